// sarcasm: command-line front end over the libsarcasm C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "sarcasm/sarcasm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

bool use_color() {
  const char* no_color = std::getenv("NO_COLOR");
  return (no_color == nullptr || *no_color == '\0') && isatty(fileno(stderr));
}

int report_error(int code, const std::string& context) {
  const char* prefix = use_color() ? "\033[31merror:\033[0m" : "error:";
  std::fprintf(stderr, "%s %s: %s\n", prefix, context.c_str(), sarc_last_error());
  return code;
}

sarc_format parse_format(const std::string& name) {
  if (name == "csv") return SARC_FORMAT_CSV;
  if (name == "jsonl") return SARC_FORMAT_JSONL;
  return SARC_FORMAT_AUTO;
}

void print_stats(const char* title, const sarc_stats& s) {
  std::printf("%stotal %zu\nsarcastic %zu\nnon_sarcastic %zu\n", title, s.total, s.sarcastic,
              s.non_sarcastic);
}

struct Dataset {
  sarc_dataset* ptr = nullptr;
  ~Dataset() { sarc_dataset_free(ptr); }
};

int cmd_stats(const std::string& path, const std::string& format) {
  Dataset d;
  if (sarc_dataset_load(path.c_str(), parse_format(format), &d.ptr) != SARC_OK)
    return report_error(kExitUsage, "stats");
  sarc_stats s{};
  sarc_dataset_stats(d.ptr, &s);
  print_stats("", s);
  return kExitOk;
}

struct AugmentArgs {
  std::string input;
  std::string ops;
  std::uint64_t seed = 0;
  double delete_rate = 0.1;
  double replace_rate = 0.1;
  std::string target = "sarcastic";
  std::uint32_t copies = 1;
  std::string dict;
  std::string out;
  std::string format;
};

int cmd_augment(const AugmentArgs& a) {
  Dataset in;
  if (sarc_dataset_load(a.input.c_str(), parse_format(a.format), &in.ptr) != SARC_OK)
    return report_error(kExitUsage, "augment");
  sarc_synonyms* dict = nullptr;
  if (!a.dict.empty() && sarc_synonyms_load(a.dict.c_str(), &dict) != SARC_OK)
    return report_error(kExitUsage, "augment");

  sarc_augment_options opts;
  sarc_augment_options_init(&opts);
  opts.ops = a.ops.c_str();
  opts.seed = a.seed;
  opts.delete_rate = a.delete_rate;
  opts.replace_rate = a.replace_rate;
  opts.target_both = a.target == "both";
  opts.copies = a.copies;

  Dataset out;
  const auto st = sarc_augment(in.ptr, &opts, dict, &out.ptr);
  sarc_synonyms_free(dict);
  if (st != SARC_OK)
    return report_error(st == SARC_ERR_RUNTIME ? kExitRuntime : kExitUsage, "augment");
  if (sarc_dataset_save(out.ptr, a.out.c_str(), parse_format(a.format)) != SARC_OK)
    return report_error(kExitRuntime, "augment");

  sarc_stats before{}, after{};
  sarc_dataset_stats(in.ptr, &before);
  sarc_dataset_stats(out.ptr, &after);
  print_stats("before:\n", before);
  print_stats("after:\n", after);
  return kExitOk;
}

struct RunArgs {
  std::string config;
  std::string out = "sarcasm-out";
  std::string ablate;
  unsigned jobs = 1;
  std::string export_texts;
};

int cmd_run(const RunArgs& a) {
  sarc_ablation axis = SARC_ABLATE_NONE;
  if (a.ablate == "augmentation") axis = SARC_ABLATE_AUGMENTATION;
  if (a.ablate == "preprocess") axis = SARC_ABLATE_PREPROCESS;
  if (a.ablate == "embedding") axis = SARC_ABLATE_EMBEDDING;

  sarc_config* cfg = nullptr;
  if (sarc_config_load(a.config.c_str(), &cfg) != SARC_OK) return report_error(kExitUsage, "run");

  int code = kExitOk;
  if (!a.export_texts.empty()) {
    if (sarc_export_texts(cfg, a.export_texts.c_str(), SARC_FORMAT_AUTO) != SARC_OK)
      code = report_error(kExitRuntime, "run");
    else
      std::printf("wrote %s\n", a.export_texts.c_str());
    sarc_config_free(cfg);
    return code;
  }

  sarc_run_summary summary{};
  if (sarc_run(cfg, axis, a.jobs, a.out.c_str(), &summary) != SARC_OK) {
    code = report_error(kExitRuntime, "run");
  } else if (summary.rows == 1) {
    std::printf("f1_sarcastic %.4f\naccuracy %.4f\n", summary.f1_sarcastic, summary.accuracy);
  } else {
    std::printf("%zu rows\n", summary.rows);
  }
  if (summary.rows > 0) std::printf("reports in %s\n", a.out.c_str());
  sarc_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sarcasm detection experiments: corpus stats, augmentation, SVM runs"};
  app.set_version_flag("--version", std::string(sarc_version()));
  app.require_subcommand(1);

  std::string stats_path, stats_format;
  auto* stats = app.add_subcommand("stats", "Print class counts of a dataset");
  stats->add_option("dataset", stats_path, "CSV or JSONL dataset")->required();
  stats->add_option("--format", stats_format)->check(CLI::IsMember({"csv", "jsonl"}));

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Write a dataset plus augmented copies");
  augment->add_option("dataset", aug.input)->required();
  augment->add_option("--ops", aug.ops, "shuffle,delete,replace (any nonempty subset)")
      ->required();
  augment->add_option("--seed", aug.seed);
  augment->add_option("--delete-rate", aug.delete_rate);
  augment->add_option("--replace-rate", aug.replace_rate);
  augment->add_option("--target", aug.target)->check(CLI::IsMember({"sarcastic", "both"}));
  augment->add_option("--copies", aug.copies);
  augment->add_option("--dict", aug.dict, "synonym TSV: root<TAB>syn1,syn2");
  augment->add_option("--out", aug.out)->required();
  augment->add_option("--format", aug.format)->check(CLI::IsMember({"csv", "jsonl"}));

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment config and write reports");
  run->add_option("config", run_args.config)->required();
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--ablate", run_args.ablate)
      ->check(CLI::IsMember({"augmentation", "preprocess", "embedding"}));
  run->add_option("--jobs", run_args.jobs)->check(CLI::PositiveNumber);
  run->add_option("--export-texts", run_args.export_texts,
                  "write the texts needing sentence embeddings and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (stats->parsed()) return cmd_stats(stats_path, stats_format);
  if (augment->parsed()) return cmd_augment(aug);
  return cmd_run(run_args);
}
