#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <set>
#include <thread>

#include "sarcasm/error.hpp"
#include "sarcasm/eval.hpp"
#include "sarcasm/hash.hpp"
#include "sarcasm/rng.hpp"

namespace sarcasm {
namespace {

template <typename Fn>
auto in_stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.kind(), e.what(), name);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Runtime, e.what(), name);
  }
}

struct Split {
  Dataset train;  // augmented / merged
  Dataset test;   // untouched
};

Split prepare_split(const ExperimentConfig& cfg, const StageSeeds& seeds) {
  Dataset full = in_stage("load", [&] { return load_dataset(cfg.dataset_path); });
  auto [train, test] =
      in_stage("split", [&] { return stratified_split(full, cfg.test_fraction, seeds.split); });

  if (!cfg.merge_paths.empty()) {
    train = in_stage("load", [&] {
      std::vector<Dataset> parts{train};
      for (const auto& p : cfg.merge_paths) parts.push_back(load_dataset(p));
      return merge_datasets(parts);
    });
  }
  if (cfg.generated) {
    train = in_stage("augment", [&] {
      auto sample = ingest_generated(cfg.generated->path, cfg.generated->per_class_quota,
                                     seeds.generated);
      Dataset out = train;
      out.records.insert(out.records.end(), sample.records.begin(), sample.records.end());
      return out;
    });
  }
  if (cfg.augmentation) {
    train = in_stage("augment", [&] {
      SynonymDictionary dict;
      if (cfg.augmentation->synonyms_path)
        dict = load_synonym_dictionary(*cfg.augmentation->synonyms_path);
      auto plan = cfg.augmentation->plan;
      plan.seed = seeds.augment;
      return augment_dataset(train, plan, cfg.augmentation->policy, dict);
    });
  }
  return {std::move(train), std::move(test)};
}

std::string embedding_key_text(const ExperimentConfig& cfg, const TweetRecord& r) {
  return cfg.preprocess.any() ? preprocess_text(r.text(), cfg.preprocess) : r.text();
}

Vector lookup_embedding(const SentenceEmbeddingTable& table, const std::string& text) {
  const auto* row = table.find_text(text);
  if (!row) {
    const auto shown = text.size() > 60 ? text.substr(0, 60) + "..." : text;
    throw Error(ErrorKind::NotFound, "no sentence embedding for text \"" + shown +
                                         "\" (run with --export-texts and re-export)");
  }
  return Vector::dense(std::vector<double>(row->begin(), row->end()));
}

std::string format_plan(const ExperimentConfig& cfg) {
  std::string name = cfg.augmentation ? cfg.augmentation->plan.name() : "None";
  if (cfg.generated) name = name == "None" ? "Generated" : name + "+Generated";
  return name;
}

}  // namespace

std::string_view backend_name(EmbeddingBackend backend) noexcept {
  switch (backend) {
    case EmbeddingBackend::Tfidf: return "tfidf";
    case EmbeddingBackend::Word2Vec: return "word2vec";
    case EmbeddingBackend::Transformer: return "transformer";
  }
  return "tfidf";
}

EmbeddingBackend parse_backend(std::string_view raw) {
  std::string name(raw);
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "tfidf" || name == "tf-idf") return EmbeddingBackend::Tfidf;
  if (name == "word2vec") return EmbeddingBackend::Word2Vec;
  if (name == "transformer" || name == "bert" || name == "semb")
    return EmbeddingBackend::Transformer;
  throw Error(ErrorKind::Config, "unknown embedding backend '" + std::string(raw) +
                                     "'; valid: tfidf, word2vec, transformer");
}

StageSeeds stage_seeds(std::uint64_t root) noexcept {
  return {derive_seed(root, "split"), derive_seed(root, "augment"),
          derive_seed(root, "generated"), derive_seed(root, "word2vec"),
          derive_seed(root, "svm")};
}

void ExperimentConfig::validate() const {
  namespace fs = std::filesystem;
  const auto require_file = [](const fs::path& p, const char* key) {
    if (!fs::is_regular_file(p))
      throw Error(ErrorKind::Config, std::string(key) + ": file not found: " + p.string());
  };
  require_file(dataset_path, "data.path");
  for (const auto& p : merge_paths) require_file(p, "data.merge");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::Config, "data.test_fraction must lie in (0, 1)");
  preprocess.validate();
  if (augmentation) {
    augmentation->plan.validate();
    augmentation->policy.validate();
    if (augmentation->synonyms_path) require_file(*augmentation->synonyms_path, "augment.synonyms");
  }
  if (generated) require_file(generated->path, "generated.path");
  if (embedding.backend == EmbeddingBackend::Word2Vec) embedding.word2vec.validate();
  if (embedding.backend == EmbeddingBackend::Transformer) {
    if (!embedding.semb_path)
      throw Error(ErrorKind::Config, "embedding.semb is required for the transformer backend");
    require_file(*embedding.semb_path, "embedding.semb");
  }
  SvmConfig probe = svm;
  if (gamma_auto) probe.gamma = 1.0;
  probe.validate();
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["data"] = {{"path", dataset_path.string()}, {"test_fraction", test_fraction}};
  auto merges = nlohmann::ordered_json::array();
  for (const auto& p : merge_paths) merges.push_back(p.string());
  j["data"]["merge"] = merges;
  j["preprocess"] = {{"remove_links", preprocess.remove_links},
                     {"remove_emojis", preprocess.remove_emojis},
                     {"remove_stopwords", preprocess.remove_stopwords},
                     {"stem", preprocess.stem},
                     {"lemmatize", preprocess.lemmatize}};
  if (augmentation) {
    const auto& a = *augmentation;
    j["augment"] = {{"ops", a.plan.code()},
                    {"delete_rate", a.plan.delete_rate},
                    {"replace_rate", a.plan.replace_rate},
                    {"target", a.policy.target_class == TargetClass::Both ? "both" : "sarcastic"},
                    {"copies", a.policy.copies_per_record},
                    {"synonyms", a.synonyms_path ? a.synonyms_path->string() : ""}};
  } else {
    j["augment"] = nullptr;
  }
  if (generated) {
    j["generated"] = {{"path", generated->path.string()},
                      {"per_class_quota", generated->per_class_quota}};
  } else {
    j["generated"] = nullptr;
  }
  j["embedding"] = {{"backend", backend_name(embedding.backend)},
                    {"semb", embedding.semb_path ? embedding.semb_path->string() : ""},
                    {"dim", embedding.word2vec.dim},
                    {"window", embedding.word2vec.window},
                    {"negatives", embedding.word2vec.negatives},
                    {"epochs", embedding.word2vec.epochs},
                    {"lr", embedding.word2vec.lr}};
  j["svm"] = {{"C", svm.C},
              {"gamma", gamma_auto ? nlohmann::ordered_json("scale") : nlohmann::ordered_json(svm.gamma)},
              {"tol", svm.tol},
              {"max_passes", svm.max_passes},
              {"cache_rows", svm.cache_rows},
              {"max_iterations", svm.max_iterations}};
  return j;
}

std::string ExperimentConfig::fingerprint() const {
  return sha256_hex(to_json().dump()).substr(0, 16);
}

std::string record_multiset_digest(const std::vector<TweetRecord>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["text"] = r.text();
    j["label"] = label_name(r.label());
    j["sarcasm_types"] = r.sarcasm_types();
    j["source"] = source_name(r.source());
    lines.push_back(j.dump());
  }
  std::sort(lines.begin(), lines.end());
  std::string all;
  for (const auto& l : lines) all += l + '\n';
  return sha256_hex(all);
}

nlohmann::ordered_json ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["row_name"] = row_name;
  j["fingerprint"] = fingerprint;
  j["status"] = ok ? "ok" : "failed";
  if (!ok) j["error"] = error;
  j["f1_sarcastic"] = f1_sarcastic;
  j["accuracy"] = accuracy;
  j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn},
                    {"tn", confusion.tn}};
  j["resolved"] = {{"backend", backend},
                   {"preprocess", preprocess},
                   {"augmentation", augmentation},
                   {"C", C},
                   {"gamma", gamma},
                   {"delete_rate", delete_rate},
                   {"replace_rate", replace_rate},
                   {"test_fraction", test_fraction},
                   {"seed", seed}};
  j["n_train"] = n_train;
  j["n_test"] = n_test;
  j["support_vectors"] = support_vectors;
  j["svm_converged"] = svm_converged;
  j["test_digest"] = test_digest;
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& row_name,
                                SvmModel* model_out) {
  const auto start = std::chrono::steady_clock::now();
  in_stage("validate", [&] { cfg.validate(); });
  const auto seeds = stage_seeds(cfg.seed);

  ExperimentReport report;
  report.row_name = row_name;
  report.fingerprint = cfg.fingerprint();
  report.backend = backend_name(cfg.embedding.backend);
  report.preprocess = cfg.preprocess.name();
  report.augmentation = format_plan(cfg);
  report.C = cfg.svm.C;
  report.delete_rate = cfg.augmentation ? cfg.augmentation->plan.delete_rate : 0.0;
  report.replace_rate = cfg.augmentation ? cfg.augmentation->plan.replace_rate : 0.0;
  report.test_fraction = cfg.test_fraction;
  report.seed = cfg.seed;

  auto split = prepare_split(cfg, seeds);
  report.n_train = split.train.size();
  report.n_test = split.test.size();
  report.test_digest = record_multiset_digest(split.test.records);

  const auto tokens_of = [&](const Dataset& d) {
    std::vector<TokenList> out;
    out.reserve(d.size());
    for (const auto& r : d.records) out.push_back(preprocess_tokens(r.text(), cfg.preprocess));
    return out;
  };
  const auto tokenized = in_stage(
      "preprocess", [&] { return std::pair{tokens_of(split.train), tokens_of(split.test)}; });
  const auto& train_tokens = tokenized.first;
  const auto& test_tokens = tokenized.second;

  LabeledMatrix train_matrix;
  std::vector<Vector> test_rows;
  in_stage("embed", [&] {
    switch (cfg.embedding.backend) {
      case EmbeddingBackend::Tfidf: {
        const auto model = fit_tfidf(train_tokens);
        for (const auto& t : train_tokens) train_matrix.X.push_back(tfidf_vector(model, t));
        for (const auto& t : test_tokens) test_rows.push_back(tfidf_vector(model, t));
        break;
      }
      case EmbeddingBackend::Word2Vec: {
        auto w2v = cfg.embedding.word2vec;
        w2v.seed = seeds.word2vec;
        const auto trained = train_word2vec(train_tokens, w2v);
        const SentenceBackend backend = &trained.embeddings;
        for (const auto& t : train_tokens) train_matrix.X.push_back(sentence_vector(backend, t));
        for (const auto& t : test_tokens) test_rows.push_back(sentence_vector(backend, t));
        break;
      }
      case EmbeddingBackend::Transformer: {
        const auto table = load_embedding_file(*cfg.embedding.semb_path);
        for (const auto& r : split.train.records)
          train_matrix.X.push_back(lookup_embedding(table, embedding_key_text(cfg, r)));
        for (const auto& r : split.test.records)
          test_rows.push_back(lookup_embedding(table, embedding_key_text(cfg, r)));
        break;
      }
    }
    for (const auto& r : split.train.records) train_matrix.y.push_back(label_sign(r.label()));
  });

  const SvmModel model = in_stage("train", [&] {
    SvmConfig svm = cfg.svm;
    svm.seed = seeds.svm;
    if (cfg.gamma_auto) svm.gamma = scale_gamma(train_matrix);
    SmoStats stats;
    auto m = train_svm(train_matrix, svm, {}, &stats);
    report.svm_converged = stats.converged;
    return m;
  });
  report.gamma = model.config.gamma;
  report.support_vectors = model.support_count();

  in_stage("evaluate", [&] {
    std::vector<Label> predictions, golds;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      predictions.push_back(predict(model, test_rows[i]));
      golds.push_back(split.test.records[i].label());
    }
    report.confusion = confusion_matrix(predictions, golds);
    report.f1_sarcastic = f1_sarcastic(report.confusion);
    report.accuracy = accuracy(report.confusion);
  });

  if (model_out) *model_out = model;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Dataset embedding_texts(const ExperimentConfig& cfg) {
  in_stage("validate", [&] {
    auto probe = cfg;
    probe.embedding.backend = EmbeddingBackend::Tfidf;  // the SEMB file may not exist yet
    probe.validate();
  });
  auto split = prepare_split(cfg, stage_seeds(cfg.seed));
  Dataset out;
  out.provenance = "embedding texts for " + cfg.fingerprint();
  std::set<std::string> seen;
  for (const auto* part : {&split.train, &split.test}) {
    for (const auto& r : part->records) {
      auto text = embedding_key_text(cfg, r);
      if (!seen.insert(text).second) continue;
      out.records.push_back(r.with_text(std::move(text)));
    }
  }
  return out;
}

AblationAxis parse_axis(std::string_view name) {
  if (name == "augmentation") return AblationAxis::AugmentationCombos;
  if (name == "preprocess") return AblationAxis::PreprocessFlags;
  if (name == "embedding") return AblationAxis::EmbeddingBackends;
  throw Error(ErrorKind::Config, "unknown ablation axis '" + std::string(name) +
                                     "'; valid: augmentation, preprocess, embedding");
}

std::vector<std::pair<std::string, ExperimentConfig>> ablation_rows(const ExperimentConfig& base,
                                                                    AblationAxis axis) {
  std::vector<std::pair<std::string, ExperimentConfig>> rows;
  switch (axis) {
    case AblationAxis::AugmentationCombos: {
      AugmentationSetup templ = base.augmentation.value_or(AugmentationSetup{});
      auto baseline = base;
      baseline.augmentation.reset();
      rows.emplace_back("None", baseline);
      for (const auto& plan : all_plans(templ.plan.delete_rate, templ.plan.replace_rate, 0)) {
        auto cfg = base;
        cfg.augmentation = templ;
        cfg.augmentation->plan = plan;
        rows.emplace_back(plan.name(), std::move(cfg));
      }
      break;
    }
    case AblationAxis::PreprocessFlags: {
      for (unsigned mask = 0; mask < 32; ++mask) {
        PreprocessConfig p;
        p.remove_links = (mask & 1u) != 0;
        p.remove_emojis = (mask & 2u) != 0;
        p.remove_stopwords = (mask & 4u) != 0;
        p.stem = (mask & 8u) != 0;
        p.lemmatize = (mask & 16u) != 0;
        if (p.stem && p.lemmatize) continue;
        auto cfg = base;
        cfg.preprocess = p;
        rows.emplace_back(p.name(), std::move(cfg));
      }
      break;
    }
    case AblationAxis::EmbeddingBackends: {
      const std::pair<const char*, EmbeddingBackend> backends[] = {
          {"TF-IDF", EmbeddingBackend::Tfidf},
          {"Word2Vec", EmbeddingBackend::Word2Vec},
          {"Transformer", EmbeddingBackend::Transformer}};
      for (const auto& [name, backend] : backends) {
        auto cfg = base;
        cfg.embedding.backend = backend;
        rows.emplace_back(name, std::move(cfg));
      }
      break;
    }
  }
  return rows;
}

std::vector<ExperimentReport> run_ablation(const ExperimentConfig& base, AblationAxis axis,
                                           unsigned jobs) {
  const auto rows = ablation_rows(base, axis);
  std::vector<ExperimentReport> reports(rows.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const auto& [name, cfg] = rows[i];
      try {
        reports[i] = run_experiment(cfg, name);
      } catch (const std::exception& e) {
        ExperimentReport failed;
        failed.row_name = name;
        failed.fingerprint = cfg.fingerprint();
        failed.ok = false;
        failed.error = e.what();
        failed.backend = backend_name(cfg.embedding.backend);
        failed.preprocess = cfg.preprocess.name();
        failed.augmentation = format_plan(cfg);
        failed.C = cfg.svm.C;
        failed.test_fraction = cfg.test_fraction;
        failed.seed = cfg.seed;
        reports[i] = std::move(failed);
      }
    }
  };
  const unsigned n_threads = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(rows.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return reports;
}

}  // namespace sarcasm
