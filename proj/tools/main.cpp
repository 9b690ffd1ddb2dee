#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dphase/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace dphase::cli;
  CLI::App app{"Double-phase energy approximation experiments"};
  app.require_subcommand(1);
  Options opts;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed")->type_name("U64");
  app.add_option("--config", opts.config_path, "experiment config (INI)")->type_name("PATH");
  app.add_option("--out", opts.out_dir, "output directory")->type_name("DIR")->capture_default_str();
  app.add_flag("--force", opts.force, "overwrite outputs and run despite failed pre-checks");
  app.fallthrough();

  std::vector<std::string> command;
  for (const auto& info : command_table()) {
    auto* sub = app.add_subcommand(info.name, info.help);
    if (!info.targets.empty()) {
      auto* target = sub->add_option("target", "one of the listed targets")->required();
      target->check(CLI::IsMember(info.targets));
    }
    sub->callback([sub, &command] {
      command = {sub->get_name()};
      for (const auto* o : sub->get_options()) {
        if (o->get_name() == "target") command.push_back(o->as<std::string>());
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (*seed_opt) opts.seed = seed;
  return run_command(command, opts, std::cout, std::cerr);
}
