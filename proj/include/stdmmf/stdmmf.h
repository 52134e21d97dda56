/* Copyright 2026 the stdmmf authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the stdmmf shared library: dual-stream (frame + optical
 * flow) salient-object detection with training, inference and an oracle-
 * verified evaluation harness. All functions return a status code; the
 * detail message of the most recent failure on the calling thread is
 * available through stdmmf_last_error(). Handles are opaque and must be
 * released with stdmmf_model_free().
 */

#ifndef STDMMF_H
#define STDMMF_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stdmmf_status {
    STDMMF_OK = 0,
    STDMMF_ERROR_INVALID_ARGUMENT = 1,
    STDMMF_ERROR_CONFIG = 2,
    STDMMF_ERROR_SHAPE = 3,
    STDMMF_ERROR_IO = 4,
    STDMMF_ERROR_DATA = 5,
    STDMMF_ERROR_CHECKPOINT = 6,
    STDMMF_ERROR_DOMAIN = 7,
    STDMMF_ERROR_TRAINING = 8,
    /* Evaluation ran on the file intersection but some files were unmatched. */
    STDMMF_ERROR_UNMATCHED_FILES = 9,
    STDMMF_ERROR_INTERNAL = 10
} stdmmf_status;

typedef struct stdmmf_model stdmmf_model;

typedef struct stdmmf_metric_report {
    double mae;
    double max_f;
    double mean_f;
    double max_em;
    double mean_em;
    double sm;
} stdmmf_metric_report;

typedef struct stdmmf_train_options {
    int deterministic;      /* force the single-threaded data path */
    int max_steps;          /* 0 = run every epoch to completion */
    /* Ablation switches; nonzero overrides the config file value. */
    int disable_temporal;
    int disable_ila;
    int disable_ilw;
    int disable_bma;
} stdmmf_train_options;

const char* stdmmf_status_name(stdmmf_status status);
const char* stdmmf_last_error(void);

/* Builds an untrained model. config_path may be NULL for defaults; the file
 * uses flat `key = value` lines with the training-config keys. */
stdmmf_status stdmmf_model_create(const char* config_path, stdmmf_model** out_model);

/* Restores a model (architecture + weights) from a checkpoint file. */
stdmmf_status stdmmf_model_open(const char* checkpoint_path, stdmmf_model** out_model);

stdmmf_status stdmmf_model_save(const stdmmf_model* model, const char* checkpoint_path);

void stdmmf_model_free(stdmmf_model* model);

/* Trains on data_dir (layout <video>/{frames,flow,gt}/NNNNN.png), writing
 * per-epoch checkpoints and train.log into out_dir. options may be NULL. */
stdmmf_status stdmmf_train(stdmmf_model* model, const char* data_dir, const char* out_dir,
                           const stdmmf_train_options* options);

/* Writes one 8-bit grayscale saliency PNG per sample at the original frame
 * resolution under out_dir/<video>/<stem>.png; nonzero write_overlay adds a
 * blended visualization next to each map. */
stdmmf_status stdmmf_infer(stdmmf_model* model, const char* data_dir, const char* out_dir, int write_overlay);

/* Evaluates prediction maps against ground-truth masks paired by relative
 * path. report_path may be NULL; when given, the key/value metric document
 * is written there. out_report may be NULL. Returns
 * STDMMF_ERROR_UNMATCHED_FILES when some files had no counterpart (the
 * report still covers the intersection). */
stdmmf_status stdmmf_evaluate(const char* pred_dir, const char* gt_dir, const char* report_path,
                              stdmmf_metric_report* out_report);

stdmmf_status stdmmf_export_overlay(const char* pred_dir, const char* frames_dir, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* STDMMF_H */
