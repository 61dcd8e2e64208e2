// gda command-line tool. Talks to the core exclusively through the C API in
// gda/gda.h. Subcommands: synth, run, profile, validate-r, export-sdp.
// Configuration is a JSON file; --set key=value overrides nest with dots
// (e.g. --set dataset.synthetic.m=100). Errors exit nonzero with a
// machine-readable JSON record on stderr.

#include <gda/gda.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using njson = nlohmann::ordered_json;

int fail_with(const std::string& where, gda_status status) {
  njson err;
  err["error"]["command"] = where;
  err["error"]["code"] = static_cast<int>(status);
  err["error"]["message"] = gda_last_error();
  std::cerr << err.dump() << "\n";
  return status == GDA_OK ? 1 : static_cast<int>(status);
}

njson load_config(const std::string& path, const std::vector<std::string>& overrides) {
  njson cfg = njson::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open config file: " + path);
    in >> cfg;
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("override must be key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    njson parsed;
    try {
      parsed = njson::parse(value);
    } catch (...) {
      parsed = value;  // bare strings stay strings
    }
    njson* node = &cfg;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = parsed;
  }
  return cfg;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) return false;
  out << text;
  return out.good();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized discrepancy adaptation toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate the synthetic benchmark as CSV");
  std::uint64_t synth_seed = 0;
  int synth_m = 200, synth_n = 200, synth_s = 10;
  std::string synth_out = ".";
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--m", synth_m, "source sample size");
  synth->add_option("--n", synth_n, "unlabeled target sample size");
  synth->add_option("--s", synth_s, "labeled target sample size");
  synth->add_option("--out-dir", synth_out, "output directory");

  // shared config options
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;

  auto add_config_opts = [&](CLI::App* cmd, bool out_required) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--set", overrides, "override config keys (key=value)");
    auto* o = cmd->add_option("--out", out_path, "output file");
    if (out_required) o->required();
  };

  auto* run = app.add_subcommand("run", "run the benchmark and write a JSON report");
  add_config_opts(run, false);
  auto* profile =
      app.add_subcommand("profile", "emit the slope-objective profile as CSV");
  add_config_opts(profile, false);
  auto* validater = app.add_subcommand("validate-r", "select the surrogate radius on T'");
  add_config_opts(validater, false);
  auto* exports = app.add_subcommand("export-sdp", "construct and export the SDP");
  add_config_opts(exports, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const gda_status st =
          gda_synth_csv(synth_seed, synth_m, synth_n, synth_s, synth_out.c_str());
      if (st != GDA_OK) return fail_with("synth", st);
      std::cout << "wrote source.csv, target.csv"
                << (synth_s > 0 ? ", target_labeled.csv" : "") << " to " << synth_out
                << "\n";
      return 0;
    }

    const njson cfg = load_config(config_path, overrides);
    const std::string cfg_text = cfg.dump();

    if (run->parsed()) {
      char* report = nullptr;
      const gda_status st = gda_run_experiment(cfg_text.c_str(), &report);
      if (st != GDA_OK) return fail_with("run", st);
      if (out_path.empty()) {
        std::cout << report;
      } else if (!write_file(out_path, report)) {
        gda_string_free(report);
        throw std::runtime_error("cannot write " + out_path);
      }
      gda_string_free(report);
      return 0;
    }
    if (profile->parsed()) {
      char* csv = nullptr;
      const gda_status st = gda_profile(cfg_text.c_str(), &csv);
      if (st != GDA_OK) return fail_with("profile", st);
      if (out_path.empty()) {
        std::cout << csv;
      } else if (!write_file(out_path, csv)) {
        gda_string_free(csv);
        throw std::runtime_error("cannot write " + out_path);
      }
      gda_string_free(csv);
      return 0;
    }
    if (validater->parsed()) {
      char* table = nullptr;
      const gda_status st = gda_validate_r(cfg_text.c_str(), &table);
      if (st != GDA_OK) return fail_with("validate-r", st);
      if (out_path.empty()) {
        std::cout << table;
      } else if (!write_file(out_path, table)) {
        gda_string_free(table);
        throw std::runtime_error("cannot write " + out_path);
      }
      gda_string_free(table);
      return 0;
    }
    if (exports->parsed()) {
      const gda_status st = gda_export_sdp(cfg_text.c_str(), out_path.c_str());
      if (st != GDA_OK) return fail_with("export-sdp", st);
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    njson err;
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 1;
}
