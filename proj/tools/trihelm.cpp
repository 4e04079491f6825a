#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <trihelm/cli.hpp>

namespace
{

trihelm::RunConfig load(const std::string& path, const std::vector<std::string>& overrides,
                        const std::string& output)
{
  trihelm::RunConfig config;
  if (!path.empty())
  {
    std::ifstream in(path);
    if (!in)
      throw trihelm::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    config = trihelm::parse_config(text.str());
  }
  for (const std::string& o : overrides)
    trihelm::apply_override(config, o);
  if (!output.empty())
    config.output = output;
  return config;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Nonconforming finite element solver for (id - b Laplacian)^3 u = f"};
  app.require_subcommand(1);

  std::string config_path, output;
  std::vector<std::string> overrides;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (key = value)");
    sub->add_option("--set", overrides, "override one key, e.g. --set n=16")->take_all();
    sub->add_option("--output", output, "output directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve on one mesh and write VTK and a log");
  CLI::App* conv = app.add_subcommand("convergence", "run a convergence study and write CSV");
  CLI::App* check = app.add_subcommand("check", "run the diagnostic battery");
  for (CLI::App* sub : {solve, conv, check})
    add_common(sub);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : trihelm::exit_code::config;
  }

  trihelm::RunConfig config;
  try
  {
    config = load(config_path, overrides, output);
  }
  catch (const trihelm::ConfigError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return trihelm::exit_code::config;
  }

  if (solve->parsed())
    return trihelm::cmd_solve(config);
  if (conv->parsed())
    return trihelm::cmd_convergence(config);
  return trihelm::cmd_check(config);
}
