#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HDCOS_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("hdcos_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        fs::current_path(dir);
    }
    ~TempDir() {
        fs::current_path(fs::temp_directory_path());
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
};

void write_spec(const std::string& path) {
    std::ofstream f(path);
    f << R"({"input_dim": 8, "classes": 2, "seed": 5, "layers": [)"
      << R"({"structure": "hd", "width": 8, "activation": "cosine"}]})";
}

}  // namespace

TEST_CASE("train: metrics rows, artifacts, determinism per seed") {
    TempDir tmp;
    write_spec("spec.json");
    const std::string flags =
        " --spec spec.json --dataset synth --synth-n 600 --synth-d 8 --synth-sep 6"
        " --epochs 2 --lr 0.05 --seed 42";

    REQUIRE(run("train" + flags + " --out m1.hdm --metrics me1.csv") == 0);
    const std::string metrics = slurp("me1.csv");
    CHECK(count_lines(metrics) == 3);  // header + 2 epochs
    CHECK(metrics.find("run_id,epoch,loss,accuracy,diverged") == 0);
    CHECK(fs::exists("m1.hdm"));
    CHECK(fs::exists("m1.hdm.config.json"));

    REQUIRE(run("train" + flags + " --out m2.hdm --metrics me2.csv") == 0);
    CHECK(slurp("m1.hdm") == slurp("m2.hdm"));  // byte-identical artifacts
    CHECK(slurp("me1.csv") == slurp("me2.csv"));
}

TEST_CASE("sweep: one row per cell, failures recorded not fatal") {
    TempDir tmp;
    write_spec("spec.json");
    REQUIRE(run("sweep --spec spec.json --dataset synth --synth-n 300 --synth-d 8"
                " --activations cosine,square --structures dense --lrs 0.01,0.1"
                " --optimizers sgd --trials 1 --epochs 1 --seed 7 --out sw.csv") == 0);
    const std::string csv = slurp("sw.csv");
    CHECK(count_lines(csv) == 5);  // header + 2x2 grid
    CHECK(slurp("cli_stdout.txt").find("best") != std::string::npos);
}

TEST_CASE("share-model then infer-2pc inproc: full pipeline") {
    TempDir tmp;
    write_spec("spec.json");
    const std::string data =
        " --dataset synth --synth-n 400 --synth-d 8 --synth-sep 6 --seed 42";
    REQUIRE(run("train --spec spec.json" + data +
                " --epochs 3 --lr 0.05 --out m.hdm --metrics me.csv") == 0);
    REQUIRE(run("share-model --model m.hdm --out-prefix sh --f 20 --seed 9 --batch 64") == 0);
    CHECK(fs::exists("sh.share0"));
    CHECK(fs::exists("sh.share1"));
    CHECK(fs::exists("sh.triples0"));
    CHECK(fs::exists("sh.triples1"));
    CHECK(fs::exists("sh.spec.json"));

    REQUIRE(run("infer-2pc --prefix sh" + data + " --count 64 --party both"
                " --transport inproc --out preds.csv") == 0);
    const std::string preds = slurp("preds.csv");
    CHECK(count_lines(preds) == 65);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("forward online rounds : 4 (analytic 4)") != std::string::npos);

    // under-provisioned triples are a crisp runtime error (exit 2)
    CHECK(run("infer-2pc --prefix sh" + data + " --count 128 --party both"
              " --transport inproc --out preds2.csv") == 2);
}

TEST_CASE("infer-2pc over tcp matches inproc byte for byte") {
    TempDir tmp;
    write_spec("spec.json");
    const std::string data =
        " --dataset synth --synth-n 400 --synth-d 8 --synth-sep 6 --seed 42";
    REQUIRE(run("train --spec spec.json" + data +
                " --epochs 2 --lr 0.05 --out m.hdm --metrics me.csv") == 0);
    REQUIRE(run("share-model --model m.hdm --out-prefix sh --f 20 --seed 9 --batch 32") == 0);

    REQUIRE(run("infer-2pc --prefix sh" + data + " --count 32 --party both"
                " --transport inproc --out p_in.csv") == 0);
    const std::string report_in = slurp("cli_stdout.txt");
    REQUIRE(run("infer-2pc --prefix sh" + data + " --count 32 --party both --transport tcp"
                " --bind 127.0.0.1:29917 --peer 127.0.0.1:29917 --out p_tcp.csv") == 0);
    const std::string report_tcp = slurp("cli_stdout.txt");
    CHECK(slurp("p_in.csv") == slurp("p_tcp.csv"));
    CHECK(report_in == report_tcp);  // same rounds, bytes, predictions
}

TEST_CASE("bench-costs: analytic equals measured for every cell") {
    TempDir tmp;
    {
        std::ofstream f("spec.json");
        f << R"({"input_dim": 16, "classes": 4, "seed": 5, "layers": [)"
          << R"({"structure": "dense", "width": 16, "activation": "square"},)"
          << R"({"structure": "hd", "width": 16, "activation": "cosine"},)"
          << R"({"structure": "lowrank", "width": 16, "activation": "relu_polyfit3"}]})";
    }
    REQUIRE(run("bench-costs --spec spec.json --seed 3") == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("MISMATCH") == std::string::npos);
    CHECK(out.find("all analytic costs match measured costs") != std::string::npos);
}

TEST_CASE("kernel-check prints a monotone error table") {
    TempDir tmp;
    REQUIRE(run("kernel-check --d 8 --sigma 1.0 --pairs 100 --seed 4 --out kc.csv") == 0);
    const std::string out = slurp("cli_stdout.txt");
    CHECK(out.find("error monotone non-increasing across D: yes") != std::string::npos);
    CHECK(fs::exists("kc.csv"));
    CHECK(fs::exists("kc.csv.config.json"));
}

TEST_CASE("usage errors exit with code 1") {
    TempDir tmp;
    CHECK(run("train") == 1);                       // missing --spec
    CHECK(run("train --spec missing.json") == 1);   // unreadable spec
    CHECK(run("definitely-not-a-command") != 0);
}
