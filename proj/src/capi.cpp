#include "sarcasm/sarcasm.h"

#include <exception>
#include <new>
#include <string>

#include "sarcasm/augment.hpp"
#include "sarcasm/config.hpp"
#include "sarcasm/corpus.hpp"
#include "sarcasm/error.hpp"
#include "sarcasm/eval.hpp"

struct sarc_dataset {
  sarcasm::Dataset data;
};

struct sarc_synonyms {
  sarcasm::SynonymDictionary dict;
};

struct sarc_config {
  sarcasm::ExperimentConfig cfg;
  std::filesystem::path path;
};

namespace {

thread_local std::string g_last_error;

sarc_status status_of(sarcasm::ErrorKind kind) {
  switch (kind) {
    case sarcasm::ErrorKind::Io: return SARC_ERR_IO;
    case sarcasm::ErrorKind::Parse: return SARC_ERR_PARSE;
    case sarcasm::ErrorKind::InvalidArgument: return SARC_ERR_INVALID_ARGUMENT;
    case sarcasm::ErrorKind::Config: return SARC_ERR_CONFIG;
    case sarcasm::ErrorKind::NotFound: return SARC_ERR_NOT_FOUND;
    case sarcasm::ErrorKind::Runtime: return SARC_ERR_RUNTIME;
  }
  return SARC_ERR_RUNTIME;
}

sarc_status fail(sarc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
sarc_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const sarcasm::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SARC_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(SARC_ERR_RUNTIME, e.what());
  }
}

std::optional<sarcasm::FileFormat> to_format(sarc_format f) {
  switch (f) {
    case SARC_FORMAT_CSV: return sarcasm::FileFormat::Csv;
    case SARC_FORMAT_JSONL: return sarcasm::FileFormat::Jsonl;
    default: return std::nullopt;
  }
}

}  // namespace

extern "C" {

const char* sarc_version(void) { return sarcasm::kToolVersion.data(); }

const char* sarc_last_error(void) { return g_last_error.c_str(); }

const char* sarc_status_name(sarc_status status) {
  switch (status) {
    case SARC_OK: return "ok";
    case SARC_ERR_IO: return "io";
    case SARC_ERR_PARSE: return "parse";
    case SARC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SARC_ERR_CONFIG: return "config";
    case SARC_ERR_NOT_FOUND: return "not_found";
    case SARC_ERR_RUNTIME: return "runtime";
  }
  return "unknown";
}

sarc_status sarc_dataset_load(const char* path, sarc_format format, sarc_dataset** out) {
  if (!path || !out) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_dataset_load: null argument");
  *out = nullptr;
  return guarded([&] {
    const auto fmt = to_format(format);
    auto d = fmt ? sarcasm::load_dataset(path, *fmt) : sarcasm::load_dataset(path);
    *out = new sarc_dataset{std::move(d)};
    return SARC_OK;
  });
}

void sarc_dataset_free(sarc_dataset* dataset) { delete dataset; }

sarc_status sarc_dataset_stats(const sarc_dataset* dataset, sarc_stats* out) {
  if (!dataset || !out) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_dataset_stats: null argument");
  const auto s = sarcasm::class_stats(dataset->data);
  *out = sarc_stats{s.n_total, s.n_sarcastic, s.n_non_sarcastic};
  return SARC_OK;
}

sarc_status sarc_dataset_save(const sarc_dataset* dataset, const char* path, sarc_format format) {
  if (!dataset || !path) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_dataset_save: null argument");
  return guarded([&] {
    const auto fmt = to_format(format).value_or(sarcasm::format_from_path(path));
    sarcasm::write_dataset(dataset->data, path, fmt);
    return SARC_OK;
  });
}

sarc_status sarc_synonyms_load(const char* path, sarc_synonyms** out) {
  if (!path || !out) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_synonyms_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new sarc_synonyms{sarcasm::load_synonym_dictionary(path)};
    return SARC_OK;
  });
}

void sarc_synonyms_free(sarc_synonyms* synonyms) { delete synonyms; }

void sarc_augment_options_init(sarc_augment_options* options) {
  if (!options) return;
  const sarcasm::AugmentationPlan plan;
  *options = sarc_augment_options{"", plan.delete_rate, plan.replace_rate, 0, 0, 1};
}

sarc_status sarc_augment(const sarc_dataset* input, const sarc_augment_options* options,
                         const sarc_synonyms* synonyms, sarc_dataset** out) {
  if (!input || !options || !out)
    return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_augment: null argument");
  *out = nullptr;
  return guarded([&] {
    auto plan = sarcasm::parse_plan_ops(options->ops ? options->ops : "");
    plan.delete_rate = options->delete_rate;
    plan.replace_rate = options->replace_rate;
    plan.seed = options->seed;
    plan.validate();
    sarcasm::AugmentPolicy policy;
    policy.target_class =
        options->target_both ? sarcasm::TargetClass::Both : sarcasm::TargetClass::SarcasticOnly;
    policy.copies_per_record = options->copies;
    policy.validate();
    static const sarcasm::SynonymDictionary empty;
    const auto& dict = synonyms ? synonyms->dict : empty;
    *out = new sarc_dataset{sarcasm::augment_dataset(input->data, plan, policy, dict)};
    return SARC_OK;
  });
}

sarc_status sarc_config_load(const char* path, sarc_config** out) {
  if (!path || !out) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_config_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto cfg = sarcasm::load_experiment_config(path);
    try {
      cfg.validate();
    } catch (const sarcasm::Error& e) {
      throw sarcasm::Error(sarcasm::ErrorKind::Config, e.what());
    }
    *out = new sarc_config{std::move(cfg), path};
    return SARC_OK;
  });
}

void sarc_config_free(sarc_config* config) { delete config; }

sarc_status sarc_run(const sarc_config* config, sarc_ablation ablation, unsigned jobs,
                     const char* out_dir, sarc_run_summary* summary) {
  if (!config || !out_dir) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_run: null argument");
  if (summary) *summary = sarc_run_summary{0, 0, 0.0, 0.0};
  return guarded([&] {
    sarcasm::RunOptions options;
    options.config_path = config->path;
    options.out_dir = out_dir;
    options.jobs = jobs == 0 ? 1 : jobs;
    switch (ablation) {
      case SARC_ABLATE_NONE: break;
      case SARC_ABLATE_AUGMENTATION: options.ablate = sarcasm::AblationAxis::AugmentationCombos; break;
      case SARC_ABLATE_PREPROCESS: options.ablate = sarcasm::AblationAxis::PreprocessFlags; break;
      case SARC_ABLATE_EMBEDDING: options.ablate = sarcasm::AblationAxis::EmbeddingBackends; break;
      default: return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_run: unknown ablation axis");
    }
    const auto outcome = sarcasm::run_to_directory(config->cfg, options);
    std::size_t failed = 0;
    std::string first_error;
    for (const auto& r : outcome.reports) {
      if (r.ok) continue;
      if (failed++ == 0) first_error = r.row_name + ": " + r.error;
    }
    if (summary && !outcome.reports.empty()) {
      summary->rows = outcome.reports.size();
      summary->failed_rows = failed;
      summary->f1_sarcastic = outcome.reports.front().f1_sarcastic;
      summary->accuracy = outcome.reports.front().accuracy;
    }
    if (failed)
      return fail(SARC_ERR_RUNTIME, std::to_string(failed) + " of " +
                                        std::to_string(outcome.reports.size()) +
                                        " rows failed; first: " + first_error);
    return SARC_OK;
  });
}

sarc_status sarc_export_texts(const sarc_config* config, const char* path, sarc_format format) {
  if (!config || !path) return fail(SARC_ERR_INVALID_ARGUMENT, "sarc_export_texts: null argument");
  return guarded([&] {
    const auto fmt = to_format(format).value_or(sarcasm::format_from_path(path));
    sarcasm::write_dataset(sarcasm::embedding_texts(config->cfg), path, fmt);
    return SARC_OK;
  });
}

}  // extern "C"
