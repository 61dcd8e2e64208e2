#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gda/gda.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;

TEST_CASE("version and error strings are always available") {
  CHECK(gda_version() != nullptr);
  CHECK(gda_last_error() != nullptr);
}

TEST_CASE("synthetic dataset lifecycle") {
  gda_dataset* ds = nullptr;
  REQUIRE(gda_dataset_synth(7, 30, 20, 5, &ds) == GDA_OK);
  int m = 0, n = 0, s = 0, d = 0;
  REQUIRE(gda_dataset_dims(ds, &m, &n, &s, &d) == GDA_OK);
  CHECK(m == 30);
  CHECK(n == 20);
  CHECK(s == 5);
  CHECK(d == 1);
  gda_dataset_free(ds);
}

TEST_CASE("save and reload round-trips through the C surface") {
  const auto dir = fs::temp_directory_path() / "gda_capi_test";
  fs::create_directories(dir);
  const std::string src = (dir / "s.csv").string();
  const std::string tgt = (dir / "t.csv").string();
  const std::string tl = (dir / "tl.csv").string();

  gda_dataset* ds = nullptr;
  REQUIRE(gda_dataset_synth(11, 12, 9, 3, &ds) == GDA_OK);
  REQUIRE(gda_dataset_save(ds, src.c_str(), tgt.c_str(), tl.c_str()) == GDA_OK);
  gda_dataset* back = nullptr;
  REQUIRE(gda_dataset_load(src.c_str(), tgt.c_str(), tl.c_str(), 0, &back) == GDA_OK);
  int m = 0, n = 0, s = 0, d = 0;
  REQUIRE(gda_dataset_dims(back, &m, &n, &s, &d) == GDA_OK);
  CHECK(m == 12);
  CHECK(n == 9);
  CHECK(s == 3);
  gda_dataset_free(ds);
  gda_dataset_free(back);
  fs::remove_all(dir);
}

TEST_CASE("missing files produce GDA_ERR_IO with a message") {
  gda_dataset* ds = nullptr;
  const gda_status st =
      gda_dataset_load("/nonexistent/x.csv", "/nonexistent/y.csv", nullptr, 0, &ds);
  CHECK(st == GDA_ERR_IO);
  CHECK(std::strlen(gda_last_error()) > 0);
}

TEST_CASE("null arguments are rejected") {
  CHECK(gda_dataset_load(nullptr, nullptr, nullptr, 0, nullptr) ==
        GDA_ERR_INVALID_ARG);
  CHECK(gda_run_experiment(nullptr, nullptr) == GDA_ERR_INVALID_ARG);
}

TEST_CASE("fit and predict through the C surface") {
  gda_dataset* ds = nullptr;
  REQUIRE(gda_dataset_synth(13, 40, 30, 10, &ds) == GDA_OK);

  for (gda_method method : {GDA_METHOD_UNIFORM, GDA_METHOD_DM, GDA_METHOD_KMM,
                            GDA_METHOD_FE, GDA_METHOD_GDM}) {
    gda_model* model = nullptr;
    const double r = method == GDA_METHOD_GDM ? 0.05 : 0.0;
    REQUIRE(gda_fit(ds, method, GDA_KERNEL_LINEAR, 0.0, 1e-3, r, 8, 5, &model) ==
            GDA_OK);
    const double x[3] = {0.05, 0.1, 0.2};
    double pred[3] = {0, 0, 0};
    REQUIRE(gda_model_predict(model, x, 3, 1, pred) == GDA_OK);
    for (double p : pred) CHECK(std::isfinite(p));
    double mse = -1.0;
    const double y[3] = {-0.05, -0.1, -0.19};
    REQUIRE(gda_model_mse(model, x, y, 3, 1, &mse) == GDA_OK);
    CHECK(mse >= 0.0);
    gda_model_free(model);
  }
  gda_dataset_free(ds);
}

TEST_CASE("gdm with r <= 0 selects the radius by validation") {
  gda_dataset* ds = nullptr;
  REQUIRE(gda_dataset_synth(17, 30, 24, 8, &ds) == GDA_OK);
  gda_model* model = nullptr;
  REQUIRE(gda_fit(ds, GDA_METHOD_GDM, GDA_KERNEL_LINEAR, 0.0, 1e-3, 0.0, 6, 2,
                  &model) == GDA_OK);
  gda_model_free(model);
  gda_dataset_free(ds);
}

TEST_CASE("run_experiment smoke test over the C surface") {
  const char* cfg = R"({
    "seed": 2, "trials": 1,
    "dataset": {"synthetic": {"m": 16, "n": 12, "s": 4}},
    "eval_n": 20,
    "methods": ["uniform"],
    "lambda_grid": [1e-3],
    "cv_folds": 4
  })";
  char* report = nullptr;
  REQUIRE(gda_run_experiment(cfg, &report) == GDA_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("\"summary\"") != std::string::npos);
  gda_string_free(report);
}

TEST_CASE("export_sdp writes a file") {
  const auto path = fs::temp_directory_path() / "gda_capi_sdp.dat-s";
  const char* cfg = R"({
    "seed": 3,
    "dataset": {"synthetic": {"m": 3, "n": 3, "s": 0}},
    "lambda": 0.05,
    "dm_iterations": 100,
    "sdp": {"r": 0.3, "weights": "uniform"}
  })";
  REQUIRE(gda_export_sdp(cfg, path.string().c_str()) == GDA_OK);
  CHECK(fs::exists(path));
  fs::remove(path);
}

TEST_CASE("synth_csv writes the CSV triple") {
  const auto dir = fs::temp_directory_path() / "gda_capi_synth";
  REQUIRE(gda_synth_csv(5, 10, 8, 2, dir.string().c_str()) == GDA_OK);
  CHECK(fs::exists(dir / "source.csv"));
  CHECK(fs::exists(dir / "target.csv"));
  CHECK(fs::exists(dir / "target_labeled.csv"));
  fs::remove_all(dir);
}
