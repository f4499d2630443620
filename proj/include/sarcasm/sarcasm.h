#ifndef SARCASM_SARCASM_H
#define SARCASM_SARCASM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SARC_API __declspec(dllexport)
#else
#define SARC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sarc_status {
  SARC_OK = 0,
  SARC_ERR_IO = 1,
  SARC_ERR_PARSE = 2,
  SARC_ERR_INVALID_ARGUMENT = 3,
  SARC_ERR_CONFIG = 4,
  SARC_ERR_NOT_FOUND = 5,
  SARC_ERR_RUNTIME = 6
} sarc_status;

typedef enum sarc_format { SARC_FORMAT_AUTO = 0, SARC_FORMAT_CSV = 1, SARC_FORMAT_JSONL = 2 } sarc_format;

typedef enum sarc_ablation {
  SARC_ABLATE_NONE = 0,
  SARC_ABLATE_AUGMENTATION = 1,
  SARC_ABLATE_PREPROCESS = 2,
  SARC_ABLATE_EMBEDDING = 3
} sarc_ablation;

typedef struct sarc_dataset sarc_dataset;
typedef struct sarc_synonyms sarc_synonyms;
typedef struct sarc_config sarc_config;

typedef struct sarc_stats {
  size_t total;
  size_t sarcastic;
  size_t non_sarcastic;
} sarc_stats;

typedef struct sarc_augment_options {
  const char* ops;  /* "shuffle,delete,replace" or a subset */
  double delete_rate;
  double replace_rate;
  uint64_t seed;
  int target_both;  /* 0: sarcastic records only, 1: both classes */
  uint32_t copies;
} sarc_augment_options;

typedef struct sarc_run_summary {
  size_t rows;
  size_t failed_rows;
  double f1_sarcastic;  /* first row */
  double accuracy;      /* first row */
} sarc_run_summary;

SARC_API const char* sarc_version(void);
/* Message of the last failed call on this thread; "" when none. */
SARC_API const char* sarc_last_error(void);
SARC_API const char* sarc_status_name(sarc_status status);

SARC_API sarc_status sarc_dataset_load(const char* path, sarc_format format, sarc_dataset** out);
SARC_API void sarc_dataset_free(sarc_dataset* dataset);
SARC_API sarc_status sarc_dataset_stats(const sarc_dataset* dataset, sarc_stats* out);
SARC_API sarc_status sarc_dataset_save(const sarc_dataset* dataset, const char* path,
                                       sarc_format format);

SARC_API sarc_status sarc_synonyms_load(const char* path, sarc_synonyms** out);
SARC_API void sarc_synonyms_free(sarc_synonyms* synonyms);

SARC_API void sarc_augment_options_init(sarc_augment_options* options);
/* synonyms may be NULL (replacement then has nothing to substitute). */
SARC_API sarc_status sarc_augment(const sarc_dataset* input, const sarc_augment_options* options,
                                  const sarc_synonyms* synonyms, sarc_dataset** out);

/* Parses and validates; validation failures return SARC_ERR_CONFIG. */
SARC_API sarc_status sarc_config_load(const char* path, sarc_config** out);
SARC_API void sarc_config_free(sarc_config* config);

/* Runs the experiment (or ablation) and writes the report directory.
   summary may be NULL. */
SARC_API sarc_status sarc_run(const sarc_config* config, sarc_ablation ablation, unsigned jobs,
                              const char* out_dir, sarc_run_summary* summary);

/* Writes the texts a transformer-backed run needs embeddings for. */
SARC_API sarc_status sarc_export_texts(const sarc_config* config, const char* path,
                                       sarc_format format);

#ifdef __cplusplus
}
#endif

#endif
