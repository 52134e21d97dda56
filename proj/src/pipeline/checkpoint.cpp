// Copyright 2026 the stdmmf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipeline/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "core/error.hpp"

namespace fs = std::filesystem;

namespace stdmmf {

namespace {

constexpr char kMagic[8] = {'S', 'T', 'D', 'M', 'M', 'F', 'C', 'P'};

struct NamedTensor {
    std::string name;
    Tensor* tensor;
};

// Serialization order: model parameters, model buffers, optimizer momentum.
std::vector<NamedTensor> gather_tensors(const DualStreamNet& model, const SgdOptimizer* opt) {
    std::vector<NamedTensor> out;
    for (auto& [name, v] : model.named_parameters()) out.push_back({name, &const_cast<Variable&>(v).value()});
    for (auto& [name, t] : model.named_buffers()) out.push_back({name, t});
    if (opt)
        for (auto& s : const_cast<SgdOptimizer*>(opt)->slots())
            out.push_back({"opt.momentum." + s.name, &s.velocity});
    return out;
}

std::string shape_token(const std::vector<int>& shape) {
    std::string s;
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s;
}

std::vector<int> parse_shape_token(const std::string& tok) {
    std::vector<int> shape;
    std::string cur;
    for (char c : tok + ",") {
        if (c == ',') {
            if (!cur.empty()) shape.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return shape;
}

struct ManifestEntry {
    std::string name;
    std::vector<int> shape;
    int64_t offset = 0;
    int64_t numel = 0;
};

struct ParsedFile {
    CheckpointHeader header;
    std::vector<ManifestEntry> entries;
    std::string payload;  // raw bytes
};

ParsedFile parse_file(const std::string& path, bool want_payload) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    if (!f.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw CheckpointError("not a checkpoint file (bad magic): " + path);

    ParsedFile out;
    TrainConfig& cfg = out.header.train_config;
    BackboneConfig& bb = out.header.backbone;
    std::string line;
    bool saw_end = false;
    while (std::getline(f, line)) {
        if (line == "@payload") {
            saw_end = true;
            break;
        }
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag.empty()) continue;
        if (tag == "version") {
            ls >> out.header.version;
            if (out.header.version != 1)
                throw CheckpointError("unsupported checkpoint version " + std::to_string(out.header.version));
        } else if (tag == "config") {
            std::string key, value;
            ls >> key >> value;
            cfg = parse_train_config_text(serialize_train_config(cfg) + key + " = " + value + "\n");
        } else if (tag == "backbone") {
            std::string key;
            ls >> key;
            if (key == "in_channels")
                ls >> bb.in_channels;
            else if (key == "width")
                ls >> bb.width_schedule[0] >> bb.width_schedule[1] >> bb.width_schedule[2] >> bb.width_schedule[3];
            else if (key == "blocks")
                ls >> bb.block_counts[0] >> bb.block_counts[1] >> bb.block_counts[2] >> bb.block_counts[3];
            else if (key == "aspp_out")
                ls >> bb.aspp_out_channels;
            else if (key == "input_size")
                ls >> bb.input_size;
            else
                throw CheckpointError("unknown backbone key in checkpoint: " + key);
        } else if (tag == "epoch") {
            ls >> out.header.epoch;
        } else if (tag == "rng") {
            std::getline(ls, out.header.rng_state);
            if (!out.header.rng_state.empty() && out.header.rng_state[0] == ' ')
                out.header.rng_state.erase(0, 1);
        } else if (tag == "tensor") {
            ManifestEntry e;
            std::string dtype, shape_tok;
            ls >> e.name >> dtype >> shape_tok >> e.offset;
            if (dtype != "f32") throw CheckpointError("tensor " + e.name + ": unsupported dtype " + dtype);
            e.shape = parse_shape_token(shape_tok);
            e.numel = shape_numel(e.shape);
            out.entries.push_back(std::move(e));
        } else {
            throw CheckpointError("unknown checkpoint header line: " + line);
        }
    }
    if (!saw_end) throw CheckpointError("truncated checkpoint (missing payload marker): " + path);
    if (want_payload) {
        std::ostringstream payload;
        payload << f.rdbuf();
        out.payload = payload.str();
    }
    return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const DualStreamNet& model, const TrainConfig& cfg, int epoch,
                     const std::string& rng_state, const SgdOptimizer* opt) {
    const auto tensors = gather_tensors(model, opt);
    std::ostringstream head;
    head.write(kMagic, 8);
    head << "version 1\n";
    {
        // Config snapshot, one token pair per key.
        std::istringstream kv(serialize_train_config(cfg));
        std::string line;
        while (std::getline(kv, line)) {
            const size_t eq = line.find(" = ");
            head << "config " << line.substr(0, eq) << " " << line.substr(eq + 3) << "\n";
        }
    }
    const BackboneConfig& bb = model.config();
    head << "backbone in_channels " << bb.in_channels << "\n";
    head << "backbone width " << bb.width_schedule[0] << " " << bb.width_schedule[1] << " " << bb.width_schedule[2]
         << " " << bb.width_schedule[3] << "\n";
    head << "backbone blocks " << bb.block_counts[0] << " " << bb.block_counts[1] << " " << bb.block_counts[2] << " "
         << bb.block_counts[3] << "\n";
    head << "backbone aspp_out " << bb.aspp_out_channels << "\n";
    head << "backbone input_size " << bb.input_size << "\n";
    head << "epoch " << epoch << "\n";
    head << "rng " << rng_state << "\n";
    int64_t offset = 0;
    for (const auto& nt : tensors) {
        head << "tensor " << nt.name << " f32 " << shape_token(nt.tensor->shape()) << " " << offset << "\n";
        offset += nt.tensor->numel() * 4;
    }
    head << "@payload\n";

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write checkpoint: " + tmp);
        const std::string h = head.str();
        f.write(h.data(), static_cast<std::streamsize>(h.size()));
        std::vector<char> buf;
        for (const auto& nt : tensors) {
            const int64_t n = nt.tensor->numel();
            buf.resize(static_cast<size_t>(n) * 4);
            for (int64_t i = 0; i < n; ++i) {
                const float v = static_cast<float>((*nt.tensor)[i]);
                std::memcpy(buf.data() + i * 4, &v, 4);
            }
            f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        }
        if (!f) throw IoError("short write on checkpoint: " + tmp);
    }
    fs::rename(tmp, path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) { return parse_file(path, false).header; }

CheckpointHeader load_checkpoint(const std::string& path, DualStreamNet& model, SgdOptimizer* opt) {
    ParsedFile file = parse_file(path, true);

    const auto tensors = gather_tensors(model, opt);
    std::map<std::string, Tensor*> expected;
    for (const auto& nt : tensors) expected[nt.name] = nt.tensor;

    std::vector<std::string> unknown, missing, mismatched;
    std::map<std::string, const ManifestEntry*> by_name;
    for (const auto& e : file.entries) {
        by_name[e.name] = &e;
        const auto it = expected.find(e.name);
        if (it == expected.end()) {
            // Optimizer state is skippable when loading without an optimizer.
            if (!(opt == nullptr && e.name.rfind("opt.momentum.", 0) == 0)) unknown.push_back(e.name);
            continue;
        }
        if (it->second->shape() != e.shape)
            mismatched.push_back(e.name + " (file " + Tensor::shape_str(e.shape) + ", model " +
                                 it->second->shape_str() + ")");
    }
    for (const auto& [name, t] : expected) {
        if (!by_name.count(name)) {
            if (opt != nullptr && name.rfind("opt.momentum.", 0) == 0) continue;  // cold optimizer start
            missing.push_back(name);
        }
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    if (!unknown.empty()) throw CheckpointError("checkpoint has unknown tensors: " + join(unknown));
    if (!missing.empty()) throw CheckpointError("checkpoint is missing tensors: " + join(missing));
    if (!mismatched.empty()) throw CheckpointError("checkpoint tensor shape mismatch: " + join(mismatched));

    // Bounds-check the payload before mutating anything.
    for (const auto& e : file.entries) {
        if (e.offset < 0 || e.offset + e.numel * 4 > static_cast<int64_t>(file.payload.size()))
            throw CheckpointError("truncated checkpoint payload at tensor " + e.name);
    }
    for (const auto& e : file.entries) {
        const auto it = expected.find(e.name);
        if (it == expected.end()) continue;
        Tensor& dst = *it->second;
        for (int64_t i = 0; i < e.numel; ++i) {
            float v;
            std::memcpy(&v, file.payload.data() + e.offset + i * 4, 4);
            dst[i] = static_cast<double>(v);
        }
    }
    return file.header;
}

}  // namespace stdmmf
