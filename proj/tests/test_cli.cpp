#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

// Runs the CLI with stdout and stderr captured to files in the work dir.
struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class Workspace {
 public:
  Workspace() {
    dir_ = fs::temp_directory_path() / ("glsc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  fs::path operator/(const std::string& name) const { return dir_ / name; }

  Run run(const std::string& args, const std::string& env = "") const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(GLSC_CLI) + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  // Synthetic corpus in the workspace root.
  void synth(const std::string& extra = "") const {
    const auto r = run("synth --out-dir '" + dir_.string() + "' --seed 5 " + extra);
    REQUIRE(r.code == 0);
  }

  std::string q(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }

 private:
  fs::path dir_;
  static inline int counter_ = 0;
};

}  // namespace

TEST_CASE("cli synth writes the corpus") {
  Workspace ws;
  ws.synth("--sub 0.1 --attribution 0.2");
  for (const char* f : {"spec.json", "ref.tsv", "hyp.tsv", "hyps.tsv", "embeddings.bin", "truth.json"})
    CHECK(fs::exists(ws / f));
  const auto spec = nlohmann::json::parse(slurp(ws / "spec.json"));
  CHECK(spec["seed"] == 5);
  CHECK(spec["error_rates"]["sub"] == 0.1);
}

TEST_CASE("cli evaluate agrees with the injected truth") {
  Workspace ws;
  ws.synth("--sub 0.1 --del 0.05 --ins 0.05");
  const auto r = ws.run("evaluate --ref " + ws.q("ref.tsv") + " --hyp " + ws.q("hyp.tsv") + " --out " +
                        ws.q("report.json") + " --oracle-check");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("cpWER") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(ws / "report.json"));
  const auto truth = nlohmann::json::parse(slurp(ws / "truth.json"));
  CHECK(report["corpus"]["wer_errors"] == truth["totals"]["errors"]);
  CHECK(report["corpus"]["cpwer_errors"] == truth["totals"]["errors"]);
  CHECK(report["corpus"]["ref_len"] == truth["totals"]["ref_len"]);
}

TEST_CASE("cli evaluate reads sot transcripts") {
  Workspace ws;
  spit(ws / "ref.sot", "m\t10\t<|SDR|><|ts:0.0|><|ts:1.0|><|spk:A|>a b<|ts:1.0|><|ts:2.0|><|spk:B|>c\n");
  spit(ws / "hyp.sot", "m\t10\t<|SDR|><|ts:0.0|><|ts:1.0|><|spk:X|>c<|ts:1.0|><|ts:2.0|><|spk:Y|>a b\n");
  const auto r = ws.run("evaluate --format sot --mode word --ref " + ws.q("ref.sot") + " --hyp " + ws.q("hyp.sot") +
                        " --out " + ws.q("r.json"));
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(ws / "r.json"));
  CHECK(report["corpus"]["cpwer_errors"] == 0);
  CHECK(report["corpus"]["wer_errors"] == 2);

  spit(ws / "bad.sot", "m\t10\t<|SDR|><|ts:0.0|><|spk:A|>a b\n");
  CHECK(ws.run("evaluate --format sot --ref " + ws.q("bad.sot") + " --hyp " + ws.q("hyp.sot")).code == 1);
  const auto lenient = ws.run("evaluate --format sot --ref " + ws.q("ref.sot") + " --hyp " + ws.q("bad.sot"));
  CHECK(lenient.code == 0);
  CHECK(lenient.err.find("missing end timestamp") != std::string::npos);
}

TEST_CASE("cli error exit codes") {
  Workspace ws;
  ws.synth();
  spit(ws / "other.tsv", "zz\tA\t0\t1\ta\n");
  CHECK(ws.run("evaluate --ref " + ws.q("ref.tsv") + " --hyp " + ws.q("other.tsv")).code == 2);
  CHECK(ws.run("evaluate --ref " + ws.q("missing.tsv") + " --hyp " + ws.q("other.tsv")).code == 1);
  CHECK(ws.run("evaluate --ref " + ws.q("ref.tsv")).code == 64);
  CHECK(ws.run("frobnicate").code == 64);
  CHECK(ws.run("segment --segments " + ws.q("ref.tsv") + " --gap-tolerance -1").code == 64);
  CHECK(ws.run("synth --out-dir " + ws.q("x") + " --speakers 6 --min-angle 3.0").code == 5);
  CHECK(ws.run("synth --out-dir " + ws.q("x") + " --sub 0.8 --del 0.8").code == 64);

  const std::string build = "build-labels --segments " + ws.q("ref.tsv") + " --hyps " + ws.q("hyps.tsv") +
                            " --out-labels " + ws.q("labels.tsv");
  CHECK(ws.run(build + " --embeddings " + ws.q("embeddings.bin") + " --algorithm kmeans").code == 64);
  CHECK(ws.run(build + " --embeddings " + ws.q("embeddings.bin") + " --algorithm kmeans --clusters 100000").code ==
        64);
  spit(ws / "one.txt", "nothing\tA\t1 0\n");
  CHECK(ws.run(build + " --embeddings " + ws.q("one.txt")).code == 4);
}

TEST_CASE("cli label and manifest flow") {
  Workspace ws;
  ws.synth("--sub 0.05");
  const auto b = ws.run("build-labels --segments " + ws.q("ref.tsv") + " --hyps " + ws.q("hyps.tsv") +
                        " --embeddings " + ws.q("embeddings.bin") + " --out-labels " + ws.q("labels.tsv") +
                        " --out-report " + ws.q("report.json") + " --log-level warn");
  REQUIRE(b.code == 0);
  const auto report = nlohmann::json::parse(slurp(ws / "report.json"));
  CHECK(report["input_utterances"].get<int>() > 0);
  CHECK(report["stages"].size() == 3);
  CHECK(!slurp(ws / "labels.tsv").empty());

  const auto seg = ws.run("segment --segments " + ws.q("ref.tsv") + " --gap-tolerance 0.5");
  CHECK(seg.code == 0);
  CHECK(!seg.out.empty());

  const std::string manifest =
      "manifest --segments " + ws.q("ref.tsv") + " --labels " + ws.q("labels.tsv") + " --out " + ws.q("m.tsv");
  REQUIRE(ws.run(manifest).code == 0);
  const auto text = slurp(ws / "m.tsv");
  CHECK(text.rfind("#alpha=0.5\n", 0) == 0);
  CHECK(text.find("\nSDR\t") != std::string::npos);
  CHECK(text.find("<|GLSC|><|spk:G") != std::string::npos);
  REQUIRE(ws.run(manifest + " --seed 9").code == 0);
  const auto again = slurp(ws / "m.tsv");
  CHECK(again != text);
  REQUIRE(ws.run("--seed 9 " + manifest).code == 0);
  CHECK(slurp(ws / "m.tsv") == again);
  CHECK(ws.run(manifest + " --alpha 1.5").code == 64);

  spit(ws / "bad_labels.tsv", "unknown_0000\tspk000\t0\t0\tG0-L0\n");
  CHECK(ws.run("manifest --segments " + ws.q("ref.tsv") + " --labels " + ws.q("bad_labels.tsv")).code == 1);
}

TEST_CASE("cli log level from the environment") {
  Workspace ws;
  ws.synth();
  const std::string build = "build-labels --segments " + ws.q("ref.tsv") + " --hyps " + ws.q("hyps.tsv") +
                            " --embeddings " + ws.q("embeddings.bin") + " --out-labels " + ws.q("l.tsv");
  CHECK(ws.run(build, "GLSC_LOG=off").err.empty());
  CHECK(!ws.run(build, "GLSC_LOG=info").err.empty());
}
