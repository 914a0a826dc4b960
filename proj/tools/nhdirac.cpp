#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhdirac/nhdirac.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

using namespace nhdirac;

// defaults < config file < NHDIRAC_OUTPUT_DIR < command-line flags
RunConfig resolve(const std::string& config_path, const std::vector<const FlagSpec*>& given,
                  const std::vector<std::vector<std::string>>& values) {
  json doc = to_json(RunConfig{});
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw config_error("cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    doc = to_json(from_json(parse_config_text(ss.str())));
  }
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) doc["output_dir"] = env;
  for (std::size_t i = 0; i < given.size(); ++i)
    for (const auto& v : values[i]) apply_flag(doc, *given[i], v);
  return from_json(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac fields on curved-spacetime lattices: spectra, LDOS, symmetry and time evolution"};
  app.require_subcommand(1);
  std::string config_path;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  const std::size_t nflags = std::size(kFlagTable);
  std::vector<std::vector<std::string>> values(nflags);
  std::vector<bool> switches(nflags, false);
  std::vector<CLI::Option*> options(nflags);
  for (std::size_t i = 0; i < nflags; ++i) {
    const auto& f = kFlagTable[i];
    if (f.kind == FlagKind::flag) {
      options[i] = app.add_flag(f.name, f.help);
    } else {
      options[i] = app.add_option(f.name, values[i], f.help);
      if (f.kind != FlagKind::param) options[i]->expected(1);
    }
  }

  struct Command {
    const char* name;
    const char* help;
    CommandResult (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"spectrum", "eigenvalues, residuals and symmetry report per time slice", cmd_spectrum},
      {"ldos", "local density of states grids and heatmaps", cmd_ldos},
      {"evolve", "time evolution trace (optionally checked against the flat dual)", cmd_evolve},
      {"classify", "symmetry classification per time slice", cmd_classify},
      {"dump", "operator matrix and metric tables", cmd_dump},
  };
  const Command* selected = nullptr;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->fallthrough();
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  RunConfig config;
  try {
    std::vector<const FlagSpec*> given;
    std::vector<std::vector<std::string>> given_values;
    for (std::size_t i = 0; i < nflags; ++i) {
      if (options[i]->count() == 0) continue;
      given.push_back(&kFlagTable[i]);
      given_values.push_back(kFlagTable[i].kind == FlagKind::flag ? std::vector<std::string>{"true"} : values[i]);
    }
    config = resolve(config_path, given, given_values);
    if (print_config) {
      std::cout << to_json(config).dump(2) << '\n';
      return 0;
    }
    validate(config, std::string_view(selected->name) == "evolve");
  } catch (const error& e) {
    std::cerr << "nhdirac: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "nhdirac: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto result = selected->run(config);
    for (const auto& m : result.messages) std::cout << m << '\n';
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
  } catch (const config_error& e) {
    std::cerr << "nhdirac: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "nhdirac: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
