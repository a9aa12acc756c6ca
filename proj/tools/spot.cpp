// spot: desk-scale multi-camera handoff prediction pipeline.
//
// Subcommands: sim, mapdoc, track, plan, eval, query, pipeline.
// Exit codes: 0 ok, 2 config/input error, 3 runtime error.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spot/pipeline.hpp"

namespace {

int classify_exit_code(const spot::Error& e) {
    switch (e.code()) {
        case spot::Errc::bad_input:
        case spot::Errc::io_error:
        case spot::Errc::invalid_fov:
        case spot::Errc::route_inconsistent:
            return 2;
        default:
            return 3;
    }
}

std::optional<spot::Vec2> parse_pos(const std::string& pos) {
    if (pos.empty()) return std::nullopt;
    auto parts = spot::split(pos, ',');
    spot::require(parts.size() == 2, spot::Errc::bad_input,
                  "--pos expects 'x,y', got '" + pos + "'");
    return spot::Vec2{std::stod(parts[0]), std::stod(parts[1])};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind-spot vehicle handoff prediction pipeline"};
    app.require_subcommand(1);

    std::string config_path = "configs/default.json";
    int jobs = 1;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Pipeline configuration file (JSON)");
    app.add_option("--jobs", jobs, "Worker threads for per-scenario stages");
    app.add_option("--set", overrides, "Override a config value, e.g. --set town.seed=9");

    auto* cmd_sim = app.add_subcommand("sim", "Generate town, cameras, and scenario data");
    auto* cmd_mapdoc = app.add_subcommand("mapdoc", "Generate map documents and signatures");
    auto* cmd_track = app.add_subcommand("track", "Recover world tracks and exit states");
    auto* cmd_plan = app.add_subcommand("plan", "Plan blind-spot paths and handoffs");
    auto* cmd_eval = app.add_subcommand("eval", "Score plans against ground truth");
    auto* cmd_pipeline = app.add_subcommand("pipeline", "Run sim, mapdoc, track, plan, eval");

    auto* cmd_query = app.add_subcommand("query", "Ask a map question");
    std::string question;
    std::string pos_arg;
    cmd_query->add_option("question", question, "Question text")->required();
    cmd_query->add_option("--pos", pos_arg, "Query position 'x,y' for the spatial filter");

    CLI11_PARSE(app, argc, argv);

    try {
        spot::Config cfg = spot::load_config(config_path, overrides);
        if (cmd_sim->parsed()) {
            spot::run_sim(cfg, jobs);
        } else if (cmd_mapdoc->parsed()) {
            spot::run_mapdoc(cfg);
        } else if (cmd_track->parsed()) {
            spot::run_track(cfg, jobs);
        } else if (cmd_plan->parsed()) {
            spot::run_plan(cfg, jobs);
        } else if (cmd_eval->parsed()) {
            spot::run_eval(cfg);
        } else if (cmd_pipeline->parsed()) {
            spot::run_pipeline(cfg, jobs);
        } else if (cmd_query->parsed()) {
            std::string answer = spot::run_query(cfg, question, parse_pos(pos_arg));
            std::fputs(answer.c_str(), stdout);
        }
    } catch (const spot::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify_exit_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
