// Copyright 2026 The SVNVS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SVNVS_SVNVS_H_
#define SVNVS_SVNVS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SVNVS_API __declspec(dllexport)
#elif defined(SVNVS_BUILDING_LIBRARY)
#define SVNVS_API __attribute__((visibility("default")))
#else
#define SVNVS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svnvs_status {
  SVNVS_OK = 0,
  SVNVS_ERR_INVALID_ARGUMENT = 1,
  SVNVS_ERR_IO = 2,
  SVNVS_ERR_FORMAT = 3,
  SVNVS_ERR_NUMERICAL = 4, /* training diverged */
  SVNVS_ERR_NOT_FOUND = 5,
  SVNVS_ERR_INTERNAL = 6,
  SVNVS_CHECK_FAILED = 7 /* svnvs_check: at least one violation */
} svnvs_status;

/* Message of the last failing call on this thread; "" after success. */
SVNVS_API const char* svnvs_last_error(void);
SVNVS_API const char* svnvs_version(void);
SVNVS_API const char* svnvs_status_name(svnvs_status status);

/* ---- scenes ------------------------------------------------------------ */

typedef struct svnvs_scene svnvs_scene;

SVNVS_API svnvs_status svnvs_scene_open(const char* manifest_path, svnvs_scene** out);
/* Renders a synthetic scene into out_dir and opens its manifest. */
SVNVS_API svnvs_status svnvs_scene_generate(const char* layout, int views, int height, int width,
                                            uint64_t seed, const char* out_dir, svnvs_scene** out);
/* Converts a COLMAP text export into a manifest at manifest_path. */
SVNVS_API svnvs_status svnvs_scene_import_colmap(const char* cameras_txt, const char* images_txt,
                                                 const char* images_dir, double d_min, double d_max,
                                                 const char* manifest_path, svnvs_scene** out);
SVNVS_API void svnvs_scene_free(svnvs_scene* scene);
SVNVS_API int svnvs_scene_view_count(const svnvs_scene* scene);
/* Borrowed; valid until the scene is freed. NULL when out of range. */
SVNVS_API const char* svnvs_scene_view_id(const svnvs_scene* scene, int index);
SVNVS_API const char* svnvs_scene_name(const svnvs_scene* scene);
SVNVS_API svnvs_status svnvs_scene_depth_range(const svnvs_scene* scene, double* d_min, double* d_max);

/* ---- training ---------------------------------------------------------- */

typedef struct svnvs_loss_report {
  double l1;
  double perceptual;
  double adversarial_g;
  double adversarial_d;
  double total;
  double psnr;
} svnvs_loss_report;

typedef void (*svnvs_progress_fn)(int64_t step, const svnvs_loss_report* report, void* user);

typedef struct svnvs_train_options {
  const char* scene;             /* manifest path, required */
  const char* out_root;          /* default "runs" */
  const char* config_json;       /* optional base configuration file */
  const char* target;            /* fixed target view id; NULL: leave-one-out */
  int views;                     /* sources per target; <= 0 keeps the base value */
  int planes;                    /* <= 0 keeps the base value */
  double d_min, d_max;           /* <= 0 takes the manifest range */
  int height, width;             /* <= 0 keeps the base value */
  int crop_height, crop_width;   /* training window; 0 x 0 full frame, < 0 keeps the base value */
  int steps;                     /* < 0 keeps the base value */
  int64_t seed;                  /* < 0 keeps the base value */
  const char* ablation;          /* NULL keeps the base value */
  int gan;                       /* 0 off, 1 on, < 0 keeps the base value */
  double learning_rate;          /* <= 0 keeps the base value */
  const char* perceptual_weights; /* VGG-19 archive; NULL keeps the base value */
  int checkpoint_every;          /* 0: final checkpoint only */
  svnvs_progress_fn progress;
  void* progress_user;
} svnvs_train_options;

SVNVS_API void svnvs_train_options_init(svnvs_train_options* options);

typedef struct svnvs_train_result {
  char run_dir[1024];
  char checkpoint[1024];
  int64_t steps;
  svnvs_loss_report last;
} svnvs_train_result;

SVNVS_API svnvs_status svnvs_train(const svnvs_train_options* options, svnvs_train_result* result);

/* Writes the effective default configuration as JSON to path. */
SVNVS_API svnvs_status svnvs_write_default_config(const char* path);

/* ---- synthesis --------------------------------------------------------- */

typedef struct svnvs_model svnvs_model;

SVNVS_API svnvs_status svnvs_model_load(const char* checkpoint, svnvs_model** out);
SVNVS_API void svnvs_model_free(svnvs_model* model);
/* Working resolution and source count of the loaded configuration. */
SVNVS_API svnvs_status svnvs_model_shape(const svnvs_model* model, int* height, int* width, int* views,
                                         int* planes);
/* Leave-one-out render of a scene view. rgb receives 3*H*W floats (planar,
   [0, 1]); depth, if non-NULL, H*W floats in scene units. */
SVNVS_API svnvs_status svnvs_model_render_view(svnvs_model* model, const svnvs_scene* scene,
                                               const char* target_id, float* rgb, size_t rgb_len,
                                               float* depth, size_t depth_len);

typedef struct svnvs_synthesize_options {
  const char* checkpoint;
  const char* scene;
  const char* target; /* view id or pose file */
  const char* out_dir;
  int permute_sources;
  uint64_t seed;
} svnvs_synthesize_options;

SVNVS_API void svnvs_synthesize_options_init(svnvs_synthesize_options* options);

typedef struct svnvs_synthesize_result {
  int has_reference;
  double psnr;
  double ssim;
  int has_permutation;
  double permutation_deviation;
  int file_count;
} svnvs_synthesize_result;

SVNVS_API svnvs_status svnvs_synthesize(const svnvs_synthesize_options* options,
                                        svnvs_synthesize_result* result);

/* ---- diagnostics ------------------------------------------------------- */

typedef struct svnvs_check_row {
  char module[64];
  char name[64];
  double value;
  double tolerance;
  int passed;
} svnvs_check_row;

/* Runs the gradient and invariant suites for modules whose id starts with
   module_filter (NULL or "" = all). Up to capacity rows are copied into rows;
   *count receives the total. Returns SVNVS_CHECK_FAILED on any violation. */
SVNVS_API svnvs_status svnvs_check(const char* module_filter, uint64_t seed, svnvs_check_row* rows,
                                   size_t capacity, size_t* count);

/* Self-test hook: corrupts the named operation until cleared with NULL. */
SVNVS_API svnvs_status svnvs_debug_inject_fault(const char* module_id);

#ifdef __cplusplus
}
#endif

#endif  // SVNVS_SVNVS_H_
