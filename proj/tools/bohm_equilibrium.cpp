#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "bohm/cli.hpp"

namespace cli = bohm::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Bohmian trajectory ensembles for regularized entangled Gaussian states",
                 "bohm-equilibrium"};

    std::string subcommand;
    std::optional<std::string> config_path;
    cli::KeyValues overrides;

    app.add_option("subcommand", subcommand,
                   "equivariance | ga-constraint | sweep | continuity | trajectory")
        ->required();
    app.add_option("--config", config_path, "flat key = value configuration file");

    // Flags that map one-to-one onto configuration keys.
    struct FlagKey
    {
        char const* flag;
        char const* key;
        char const* help;
    };
    static constexpr FlagKey flag_keys[] = {
        {"--seed", "seed", "64-bit ensemble seed"},
        {"--samples", "samples", "ensemble size"},
        {"--t-final", "t_final", "final time"},
        {"--dt", "dt", "integrator step"},
        {"--sigma-narrow", "sigma_narrow", "initial spread of the narrow mode"},
        {"--sigma-wide", "sigma_wide", "initial spread of the wide mode"},
        {"--correlation", "correlation", "narrow combination: sum or difference"},
        {"--threads", "threads", "parallel width for ensemble propagation"},
        {"--out", "out", "CSV output path"},
    };
    std::vector<std::optional<std::string>> flag_values(std::size(flag_keys));
    for (std::size_t i = 0; i < std::size(flag_keys); ++i)
        app.add_option(flag_keys[i].flag, flag_values[i], flag_keys[i].help);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const&)
    {
        std::cout << app.help() << cli::usage();
        return cli::exit_ok;
    }
    catch (CLI::ParseError const& e)
    {
        std::cerr << e.what() << '\n' << cli::usage();
        return cli::exit_validation;
    }

    for (std::size_t i = 0; i < std::size(flag_keys); ++i)
    {
        if (flag_values[i])
            overrides[flag_keys[i].key] = *flag_values[i];
    }

    if (std::find(cli::subcommands().begin(), cli::subcommands().end(), subcommand)
        == cli::subcommands().end())
    {
        std::cerr << "unknown subcommand '" << subcommand << "'\n" << cli::usage();
        return cli::exit_validation;
    }

    cli::RunConfig config;
    try
    {
        std::optional<std::filesystem::path> file;
        if (config_path)
            file = *config_path;
        config = cli::parse_config(file, overrides);
    }
    catch (cli::ParseError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::exit_validation;
    }
    catch (std::invalid_argument const& e)
    {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return cli::exit_validation;
    }

    return cli::run_subcommand(subcommand, config, std::cout, std::cerr);
}
