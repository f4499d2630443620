#include <doctest.h>

#include <random>
#include <sstream>

#include "sarcasm/config.hpp"
#include "sarcasm/error.hpp"
#include "sarcasm/eval.hpp"
#include "support.hpp"

using namespace sarcasm;

namespace {

constexpr Label S = Label::Sarcastic;
constexpr Label N = Label::NonSarcastic;

struct Workspace {
  testing::TempDir dir{"eval"};
  ExperimentConfig cfg;

  explicit Workspace(std::size_t n = 200) {
    write_dataset(testing::separable_corpus(n, 1), dir / "corpus.csv", FileFormat::Csv);
    cfg.dataset_path = dir / "corpus.csv";
  }
};

std::size_t csv_rows(const std::string& csv) {
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  return lines - 1;
}

}  // namespace

TEST_CASE("confusion matrix examples") {
  const std::vector<Label> sn{S, N};
  CHECK(confusion_matrix(sn, sn) == ConfusionMatrix{1, 0, 0, 1});
  const std::vector<Label> all_n(5, N), all_s(5, S);
  CHECK(confusion_matrix(all_n, all_s) == ConfusionMatrix{0, 0, 5, 0});
  const std::vector<Label> preds{S, S, S, N, N, N}, golds{S, S, N, S, N, N};
  CHECK(confusion_matrix(preds, golds) == ConfusionMatrix{2, 1, 1, 2});
  CHECK_THROWS_AS(confusion_matrix(preds, sn), Error);
  CHECK_THROWS_AS(confusion_matrix({}, {}), Error);
}

TEST_CASE("metric examples") {
  CHECK(f1_sarcastic({4, 0, 0, 3}) == 1.0);
  CHECK(f1_sarcastic({3, 1, 2, 0}) == doctest::Approx(6.0 / 9.0));
  CHECK(f1_sarcastic({0, 0, 0, 7}) == 0.0);
  CHECK(accuracy({4, 0, 0, 3}) == 1.0);
  CHECK(accuracy({2, 1, 1, 2}) == doctest::Approx(4.0 / 6.0));
  CHECK(accuracy({0, 0, 777, 3707}) == doctest::Approx(3707.0 / 4484.0));
  CHECK_THROWS_AS(accuracy({}), Error);
}

TEST_CASE("metric properties over random counts") {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 2000; ++i) {
    ConfusionMatrix cm{gen() % 50, gen() % 50, gen() % 50, gen() % 50};
    if (cm.total() == 0) continue;
    const double f1 = f1_sarcastic(cm), acc = accuracy(cm);
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    auto other = cm;
    other.tn = gen() % 100;
    CHECK(f1_sarcastic(other) == f1);
  }
}

TEST_CASE("backend and axis names") {
  CHECK(parse_backend("tfidf") == EmbeddingBackend::Tfidf);
  CHECK(parse_backend("Word2Vec") == EmbeddingBackend::Word2Vec);
  CHECK(parse_backend("transformer") == EmbeddingBackend::Transformer);
  CHECK_THROWS_AS(parse_backend("glove"), Error);
  CHECK(parse_axis("augmentation") == AblationAxis::AugmentationCombos);
  CHECK_THROWS_AS(parse_axis("gamma"), Error);
}

TEST_CASE("stage seeds are derived and distinct") {
  const auto a = stage_seeds(42), b = stage_seeds(43);
  CHECK(a.split != b.split);
  CHECK(a.split != a.augment);
  CHECK(a.svm != a.word2vec);
  CHECK(stage_seeds(42).svm == a.svm);
}

TEST_CASE("config validation names the offending key or path") {
  Workspace w;
  CHECK_NOTHROW(w.cfg.validate());

  auto missing = w.cfg;
  missing.dataset_path = w.dir / "nope.csv";
  CHECK_THROWS_WITH_AS(missing.validate(), doctest::Contains("nope.csv"), Error);

  auto semb = w.cfg;
  semb.embedding.backend = EmbeddingBackend::Transformer;
  semb.embedding.semb_path = w.dir / "absent.semb";
  CHECK_THROWS_WITH_AS(semb.validate(), doctest::Contains("absent.semb"), Error);

  auto fraction = w.cfg;
  fraction.test_fraction = 1.5;
  CHECK_THROWS_WITH_AS(fraction.validate(), doctest::Contains("test_fraction"), Error);

  auto both = w.cfg;
  both.preprocess.stem = both.preprocess.lemmatize = true;
  CHECK_THROWS_AS(both.validate(), Error);
}

TEST_CASE("separable corpus end to end") {
  Workspace w(400);
  const auto a = run_experiment(w.cfg);
  CHECK(a.ok);
  CHECK(a.f1_sarcastic >= 0.95);
  CHECK(a.n_test == 80);
  CHECK(a.confusion.total() == a.n_test);
  CHECK(a.f1_sarcastic == f1_sarcastic(a.confusion));
  CHECK(a.accuracy == accuracy(a.confusion));
  CHECK(a.gamma > 0.0);

  const auto b = run_experiment(w.cfg);
  CHECK(a.fingerprint == b.fingerprint);
  CHECK(a.f1_sarcastic == b.f1_sarcastic);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("augmentation never touches the test side") {
  Workspace w(120);
  const auto bare = run_experiment(w.cfg);
  auto aug = w.cfg;
  aug.augmentation = AugmentationSetup{};
  aug.augmentation->plan.use_delete = true;
  aug.augmentation->plan.use_shuffle = true;
  aug.augmentation->policy.target_class = TargetClass::Both;
  const auto augmented = run_experiment(aug);
  CHECK(augmented.test_digest == bare.test_digest);
  CHECK(augmented.n_test == bare.n_test);
  CHECK(augmented.n_train == 2 * bare.n_train);

  const auto split = stratified_split(load_dataset(w.cfg.dataset_path), w.cfg.test_fraction,
                                      stage_seeds(w.cfg.seed).split);
  CHECK(bare.test_digest == record_multiset_digest(split.second.records));
}

TEST_CASE("merged and generated data join the training side only") {
  Workspace w(100);
  write_dataset(testing::separable_corpus(40, 9), w.dir / "extra.jsonl", FileFormat::Jsonl);
  auto cfg = w.cfg;
  cfg.merge_paths.push_back(w.dir / "extra.jsonl");
  cfg.generated = GeneratedSetup{w.dir / "extra.jsonl", 5};
  const auto bare = run_experiment(w.cfg);
  const auto r = run_experiment(cfg);
  CHECK(r.test_digest == bare.test_digest);
  CHECK(r.n_train == bare.n_train + 40 + 10);
}

TEST_CASE("word2vec and transformer backends") {
  Workspace w(200);
  auto w2v = w.cfg;
  w2v.embedding.backend = EmbeddingBackend::Word2Vec;
  w2v.embedding.word2vec.dim = 16;
  CHECK(run_experiment(w2v).ok);

  auto tr = w.cfg;
  tr.embedding.backend = EmbeddingBackend::Transformer;
  tr.embedding.semb_path = w.dir / "emb.semb";
  std::vector<std::string> texts;
  for (const auto& r : embedding_texts(tr).records) texts.push_back(r.text());
  CHECK(texts.size() == 200);
  testing::write_semb_fixture(*tr.embedding.semb_path, texts, 8, 4);
  const auto report = run_experiment(tr);
  CHECK(report.f1_sarcastic >= 0.95);

  // a text missing from the file fails the embed stage
  testing::write_semb_fixture(*tr.embedding.semb_path,
                              std::vector<std::string>(texts.begin(), texts.end() - 1), 8, 4);
  try {
    run_experiment(tr);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.stage() == "embed");
  }
}

TEST_CASE("stage errors carry their tag") {
  Workspace w(10);
  auto cfg = w.cfg;
  testing::write_text(w.dir / "bad.csv", "text,label\nhello,sarcastic\n");
  cfg.dataset_path = w.dir / "bad.csv";
  try {
    run_experiment(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.stage() == "split");
  }
}

TEST_CASE("ablation rows") {
  Workspace w(60);
  const auto aug = ablation_rows(w.cfg, AblationAxis::AugmentationCombos);
  REQUIRE(aug.size() == 8);
  CHECK(aug[0].first == "None");
  CHECK_FALSE(aug[0].second.augmentation.has_value());
  CHECK(aug[1].first == "Shuffling");
  CHECK(aug[7].first == "Shuffling+Removing+Replacing");
  for (const auto& [name, cfg] : aug) CHECK(cfg.seed == w.cfg.seed);

  CHECK(ablation_rows(w.cfg, AblationAxis::PreprocessFlags).size() == 24);
  const auto emb = ablation_rows(w.cfg, AblationAxis::EmbeddingBackends);
  REQUIRE(emb.size() == 3);
  CHECK(emb[0].first == "TF-IDF");
}

TEST_CASE("ablation runs rows independently and keeps order") {
  Workspace w(120);
  auto cfg = w.cfg;
  cfg.embedding.word2vec.dim = 8;
  const auto reports = run_ablation(cfg, AblationAxis::EmbeddingBackends, 3);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].row_name == "TF-IDF");
  CHECK(reports[0].ok);
  CHECK(reports[0].f1_sarcastic >= 0.95);
  CHECK(reports[1].ok);
  CHECK_FALSE(reports[2].ok);
  CHECK(reports[2].error.find("semb") != std::string::npos);

  const auto serial = run_ablation(cfg, AblationAxis::EmbeddingBackends, 1);
  CHECK(reports_to_json(serial) == reports_to_json(reports));
}

TEST_CASE("report files") {
  ExperimentReport r;
  r.row_name = "Removing";
  r.f1_sarcastic = 2.0 / 3.0;
  r.accuracy = 0.75;
  r.confusion = {2, 1, 1, 4};
  r.backend = "tfidf";
  r.preprocess = "none";
  r.augmentation = "Removing";
  const auto csv = reports_to_csv({r});
  CHECK(csv.rfind("row_name,f1_sarcastic,accuracy,tp,fp,fn,tn,", 0) == 0);
  CHECK(csv.find("\nRemoving,0.6667,0.7500,2,1,1,4,") != std::string::npos);
  CHECK(csv_rows(csv) == 1);

  const auto json = nlohmann::json::parse(reports_to_json({r, r}));
  CHECK(json["schema_version"] == kReportSchemaVersion);
  CHECK(json["reports"].size() == 2);
  CHECK(json["reports"][0]["confusion"]["tp"] == 2);
  CHECK_FALSE(json["reports"][0].contains("wall_time_seconds"));
}

TEST_CASE("config text parsing") {
  testing::TempDir dir("cfg");
  const std::string text = R"(# experiment
seed = 7

[data]
path = "corpus.csv"
merge = ["a.jsonl", "/abs/b.csv"]
test_fraction = 0.25

[preprocess]
remove_links = true
stem = true  # trailing comment

[augment]
ops = "shuffle,delete"
delete_rate = 0.2
target = "both"
copies = 2

[embedding]
backend = "word2vec"
dim = 32
lr = 0.05

[svm]
C = 10
gamma = 0.5
max_passes = 5
)";
  const auto cfg = parse_experiment_config(text, dir.path());
  CHECK(cfg.seed == 7);
  CHECK(cfg.dataset_path == dir.path() / "corpus.csv");
  REQUIRE(cfg.merge_paths.size() == 2);
  CHECK(cfg.merge_paths[1] == "/abs/b.csv");
  CHECK(cfg.test_fraction == 0.25);
  CHECK(cfg.preprocess.remove_links);
  CHECK(cfg.preprocess.stem);
  REQUIRE(cfg.augmentation.has_value());
  CHECK(cfg.augmentation->plan.code() == "SD");
  CHECK(cfg.augmentation->plan.delete_rate == 0.2);
  CHECK(cfg.augmentation->policy.target_class == TargetClass::Both);
  CHECK(cfg.augmentation->policy.copies_per_record == 2);
  CHECK(cfg.embedding.backend == EmbeddingBackend::Word2Vec);
  CHECK(cfg.embedding.word2vec.dim == 32);
  CHECK(cfg.svm.C == 10.0);
  CHECK_FALSE(cfg.gamma_auto);
  CHECK(cfg.svm.gamma == 0.5);
  CHECK(cfg.svm.max_passes == 5);

  const auto again = parse_experiment_config(render_experiment_config(cfg), dir.path());
  CHECK(again.to_json() == cfg.to_json());
  CHECK(again.fingerprint() == cfg.fingerprint());
}

TEST_CASE("config defaults and errors") {
  const auto minimal = parse_experiment_config("[data]\npath = \"x.csv\"\n", "/base");
  CHECK(minimal.seed == 42);
  CHECK(minimal.test_fraction == 0.2);
  CHECK(minimal.svm.C == 10.0);
  CHECK(minimal.gamma_auto);
  CHECK_FALSE(minimal.augmentation.has_value());
  CHECK(minimal.embedding.backend == EmbeddingBackend::Tfidf);

  const auto none = parse_experiment_config("[data]\npath = \"x\"\n[augment]\nops = \"none\"\n", "/");
  CHECK_FALSE(none.augmentation.has_value());

  const auto error_of = [](const std::string& text) {
    try {
      parse_experiment_config(text, "/");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("[data]\npath = \"x\"\ncolour = 1\n").find("line 3") != std::string::npos);
  CHECK(error_of("[nope]\n").find("nope") != std::string::npos);
  CHECK(error_of("[data]\npath = x.csv\n").find("line 2") != std::string::npos);
  CHECK(error_of("[data]\npath = \"x\"\ntest_fraction = \"big\"\n").find("test_fraction") !=
        std::string::npos);
  CHECK(error_of("seed = 1\n").find("data.path") != std::string::npos);
  CHECK(error_of("[data]\npath = \"x\"\n[augment]\nops = \"spin\"\n").find("spin") !=
        std::string::npos);
  CHECK(error_of("[data]\npath = \"x\"\npath = \"y\"\n").find("duplicate") != std::string::npos);
}

TEST_CASE("run_to_directory writes reports and manifest") {
  Workspace w(100);
  RunOptions options;
  options.config_path = w.dir / "cfg.toml";
  options.out_dir = w.dir / "out";
  const auto outcome = run_to_directory(w.cfg, options);
  CHECK(std::filesystem::exists(outcome.json_path));
  CHECK(std::filesystem::exists(outcome.csv_path));
  CHECK(std::filesystem::exists(w.dir / "out" / "model.svmm"));
  const auto manifest = nlohmann::json::parse(testing::read_bytes(outcome.manifest_path));
  CHECK(manifest["tool_version"] == std::string(kToolVersion));
  CHECK(manifest["seeds"]["root"] == 42);
  CHECK(manifest["config"] == nlohmann::json::parse(w.cfg.to_json().dump()));

  // the resolved config reproduces the run
  const auto resolved = load_experiment_config(w.dir / "out" / "config.resolved.toml");
  CHECK(resolved.fingerprint() == w.cfg.fingerprint());
  options.out_dir = w.dir / "out2";
  run_to_directory(resolved, options);
  CHECK(testing::read_bytes(w.dir / "out" / "report.json") ==
        testing::read_bytes(w.dir / "out2" / "report.json"));
  CHECK(testing::read_bytes(w.dir / "out" / "report.csv") ==
        testing::read_bytes(w.dir / "out2" / "report.csv"));

  options.ablate = AblationAxis::AugmentationCombos;
  options.out_dir = w.dir / "ablate";
  const auto ablation = run_to_directory(w.cfg, options);
  CHECK(csv_rows(testing::read_bytes(ablation.csv_path)) == 8);
}
