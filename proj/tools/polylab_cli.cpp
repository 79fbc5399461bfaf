// polylab: simulate, verify, scaling, report and validate workflows.
//
// Exit codes: 0 ok, 1 a check failed, 2 configuration error (JSON on stderr),
// 3 input/output error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polylab/config.hpp"
#include "polylab/workflows.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

int fail(int code, const std::string& kind, const std::string& message, const json& diagnostics = json::array()) {
  json err{{"error", kind}, {"message", message}};
  if (!diagnostics.empty()) err["diagnostics"] = diagnostics;
  std::cerr << err.dump() << '\n';
  return code;
}

/// Reads and parses the config file; the caller maps the exception to an exit code.
json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw polylab::IoError("cannot read config file " + path);
  return json::parse(is);
}

polylab::RunConfig load_config(const Options& opt) {
  json j = load_json(opt.config_path);
  // Command-line overrides go through the same validation as the file.
  if (opt.seed && j.contains("environment") && j["environment"].is_object()) j["environment"]["seed"] = *opt.seed;
  if (opt.threads) j["threads"] = *opt.threads;
  if (opt.format) j["format"] = *opt.format;
  if (opt.out) j["outputDir"] = *opt.out;
  return polylab::parse_config(j);
}

int run(const std::string& subcommand, const Options& opt) {
  const std::string started = polylab::utc_timestamp();
  try {
    if (subcommand == "validate") {
      json j;
      try {
        j = load_json(opt.config_path);
      } catch (const json::parse_error& e) {
        std::cout << json::array({{{"field", "$"}, {"message", e.what()}}}).dump() << '\n';
        return polylab::kExitConfigError;
      }
      const auto diags = polylab::validate_config(j);
      std::cout << json(diags).dump() << '\n';
      return diags.empty() ? polylab::kExitOk : polylab::kExitConfigError;
    }
    if (subcommand == "report") {
      fs::path dir;
      if (opt.out) {
        dir = *opt.out;
      } else if (!opt.config_path.empty()) {
        dir = load_config(opt).output_dir;
      } else {
        return fail(polylab::kExitConfigError, "usage", "report needs --out DIR or --config PATH");
      }
      const auto result = polylab::run_report(dir);
      for (const auto& f : result.files) std::cout << f.string() << '\n';
      return polylab::kExitOk;
    }

    if (opt.config_path.empty()) return fail(polylab::kExitConfigError, "usage", subcommand + " needs --config PATH");
    const polylab::RunConfig config = load_config(opt);
    const fs::path out = config.output_dir;
    polylab::WorkflowResult result;
    if (subcommand == "simulate") {
      result = polylab::run_simulate(config, out);
    } else if (subcommand == "verify") {
      result = polylab::run_verify(config, out);
    } else {
      result = polylab::run_scaling(config, out);
    }
    polylab::write_run_meta(out, subcommand, &config, started, polylab::utc_timestamp());
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    for (const auto& id : result.failures) std::cerr << "check failed: " << id << '\n';
    return result.exit_code;
  } catch (const polylab::ConfigError& e) {
    return fail(polylab::kExitConfigError, "config", e.what(), json(e.diagnostics()));
  } catch (const json::exception& e) {
    return fail(polylab::kExitConfigError, "config", e.what(), json::array({{{"field", "$"}, {"message", e.what()}}}));
  } catch (const polylab::IoError& e) {
    return fail(polylab::kExitIoError, "io", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(polylab::kExitIoError, "io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(polylab::kExitConfigError, "config", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed polymer laboratory: exact partition functions, path sampling and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", polylab::kVersion);

  Options opt;
  std::string chosen;
  for (const char* name : {"simulate", "verify", "scaling", "report", "validate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "JSON run configuration");
    if (std::string(name) == "validate") {
      sub->get_option("--config")->required();
    } else {
      sub->add_option("--seed", opt.seed, "Environment seed (overrides the config)");
      sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::Range(1, 1024));
      sub->add_option("--out", opt.out, "Output directory");
      sub->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"json", "csv"}));
    }
    sub->callback([&chosen, name] { chosen = name; });
  }
  app.get_subcommand("simulate")->description("Forward runs and polymer endpoint/path samples");
  app.get_subcommand("verify")->description("Run the checks listed in verify.checks");
  app.get_subcommand("scaling")->description("Distances to the Brownian limit over nGrid");
  app.get_subcommand("report")->description("Summarize outputs of earlier runs");
  app.get_subcommand("validate")->description("Print configuration diagnostics as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    return fail(polylab::kExitIoError, "io", e.what());
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return polylab::kExitConfigError;
  }
  return run(chosen, opt);
}
