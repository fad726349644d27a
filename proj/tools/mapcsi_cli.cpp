// SPDX-License-Identifier: Apache-2.0
//
// mapcsi: single-site map-assisted localization from massive-MIMO CSI
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mapcsi/harness.hpp"
#include "mapcsi/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace mapcsi;

namespace
{
    struct Common
    {
        std::string map_path;
        std::string kind = "los";
        std::string config_path;
        std::string out;
        std::optional<int> n_tt, n_cc, n_max, i_max, k_max, max_order;
        std::optional<double> d_th;
        std::optional<std::uint64_t> seed;
    };

    void add_common(CLI::App *app, Common &c)
    {
        app->add_option("--map", c.map_path, "Map JSON file (default: built-in street map, see --kind)");
        app->add_option("--kind", c.kind, "Built-in street map when --map is absent")
            ->check(CLI::IsMember({"los", "mixed"}));
        app->add_option("--config", c.config_path, "JSON config; command-line flags override its values");
        app->add_option("--nmax", c.n_max, "Rays (ADP peaks) per sample");
        app->add_option("--imax", c.i_max, "Ambiguity windows tried per ray");
        app->add_option("--kmax", c.k_max, "Largest cluster count considered");
        app->add_option("--dth", c.d_th, "Single-cluster spread threshold (m)");
        app->add_option("--seed", c.seed, "Clustering seed");
        app->add_option("--max-order", c.max_order, "Highest reflection order of synthesized paths");
        app->add_option("--out", c.out, "Output path (default: stdout)");
    }

    io::RunConfig resolve_config(const Common &c)
    {
        io::RunConfig rc;
        if (!c.config_path.empty())
            rc = io::load_config(c.config_path);
        if (c.n_tt)
            rc.system.n_tt = *c.n_tt;
        if (c.n_cc)
            rc.system.n_cc = *c.n_cc;
        if (c.n_max)
            rc.pipeline.n_max = *c.n_max;
        if (c.i_max)
            rc.pipeline.i_max = *c.i_max;
        if (c.k_max)
            rc.pipeline.k_max = *c.k_max;
        if (c.d_th)
            rc.pipeline.d_th = *c.d_th;
        if (c.seed)
            rc.pipeline.seed = *c.seed;
        if (c.max_order)
            rc.max_order = *c.max_order;
        validate(rc.system);
        validate(rc.pipeline);
        return rc;
    }

    EnvironmentMap resolve_map(const Common &c)
    {
        if (!c.map_path.empty())
            return io::load_map(c.map_path);
        return street_map(scenario_kind_from_string(c.kind));
    }

    // Writes to --out, or stdout when it is empty or "-"
    template <typename Fn>
    void emit(const std::string &out, Fn &&fn)
    {
        if (out.empty() || out == "-")
        {
            fn(std::cout);
            std::cout.flush();
            return;
        }
        std::ofstream f(out, std::ios::binary);
        if (!f)
            throw std::runtime_error("Cannot write " + out);
        fn(f);
    }

    std::vector<Method> parse_methods(const std::string &m)
    {
        if (m == "csi")
            return {Method::Csi};
        if (m == "at")
            return {Method::At};
        return {Method::Csi, Method::At};
    }

    Point2 parse_point(const std::string &s)
    {
        std::istringstream is(s);
        Point2 p;
        char comma = 0;
        if (!(is >> p.x >> comma >> p.y) || comma != ',')
            throw std::invalid_argument("Expected a position as x,y but got '" + s + "'.");
        return p;
    }

    std::vector<Point2> read_positions(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw std::runtime_error("Cannot open " + path);
        std::vector<Point2> pts;
        std::string line;
        while (std::getline(f, line))
        {
            if (line.empty() || line[0] == '#' || line.rfind("x", 0) == 0)
                continue;
            pts.push_back(parse_point(line));
        }
        return pts;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Map-assisted single-site localization from massive-MIMO CSI"};
    app.require_subcommand(1);

    // gen-map
    Common gm;
    auto *gen = app.add_subcommand("gen-map", "Write a built-in street map as JSON");
    gen->add_option("--kind", gm.kind, "Scenario")->check(CLI::IsMember({"los", "mixed"}));
    gen->add_option("--out", gm.out, "Output path (default: stdout)");

    // synth
    Common sy;
    std::vector<std::string> sy_pos;
    std::string sy_positions, sy_format = "bin";
    std::optional<double> sy_snr;
    std::uint64_t sy_noise_seed = 0;
    auto *synth = app.add_subcommand("synth", "Synthesize CSI files for user positions");
    add_common(synth, sy);
    synth->add_option("--pos", sy_pos, "User position x,y (repeatable)");
    synth->add_option("--positions", sy_positions, "Text file with one x,y position per line");
    synth->add_option("--format", sy_format, "CSI file format")->check(CLI::IsMember({"bin", "json"}));
    synth->add_option("--snr", sy_snr, "Add white noise at this SNR (dB)");
    synth->add_option("--noise-seed", sy_noise_seed, "Noise generator seed");

    // localize
    Common lo;
    std::string lo_csi;
    std::optional<std::string> lo_truth;
    auto *loc = app.add_subcommand("localize", "Estimate the user position from one CSI file");
    add_common(loc, lo);
    loc->add_option("--csi", lo_csi, "CSI file (.json or binary)")->required();
    loc->add_option("--ntt", lo.n_tt, "ADP angle bins");
    loc->add_option("--ncc", lo.n_cc, "ADP delay bins");
    loc->add_option("--truth", lo_truth, "True position x,y (adds the error to the output)");

    // evaluate
    Common ev;
    std::string ev_method = "both", ev_summary;
    std::size_t ev_samples = 200;
    unsigned ev_threads = 1;
    int ev_grid_h = 5, ev_grid_v = 1000;
    std::optional<double> ev_snr;
    auto *evaluate_cmd = app.add_subcommand("evaluate", "Localize sampled grid positions and write per-sample records");
    add_common(evaluate_cmd, ev);
    evaluate_cmd->add_option("--ntt", ev.n_tt, "ADP angle bins");
    evaluate_cmd->add_option("--ncc", ev.n_cc, "ADP delay bins");
    evaluate_cmd->add_option("--method", ev_method, "Methods to run")->check(CLI::IsMember({"csi", "at", "both"}));
    evaluate_cmd->add_option("--samples", ev_samples, "Grid positions evaluated (stratified)");
    evaluate_cmd->add_option("--threads", ev_threads, "Worker threads (output does not depend on it)");
    evaluate_cmd->add_option("--grid-h", ev_grid_h, "Grid positions across the AoI");
    evaluate_cmd->add_option("--grid-v", ev_grid_v, "Grid positions along the AoI");
    evaluate_cmd->add_option("--snr", ev_snr, "Add white noise at this SNR (dB)");
    evaluate_cmd->add_option("--summary", ev_summary, "Also write the summary CSV here");

    // sweep
    Common sw;
    std::string sw_method = "both";
    std::vector<int> sw_ntt, sw_ncc;
    std::size_t sw_samples = 200;
    unsigned sw_threads = 1;
    int sw_grid_h = 5, sw_grid_v = 1000;
    std::optional<double> sw_snr;
    auto *sweep_cmd = app.add_subcommand("sweep", "Summary CSV of mean errors over ADP sizes");
    add_common(sweep_cmd, sw);
    sweep_cmd->add_option("--ntt", sw_ntt, "ADP angle sizes (comma separated)")->delimiter(',');
    sweep_cmd->add_option("--ncc", sw_ncc, "ADP delay sizes (comma separated); paired with --ntt when the counts match")
        ->delimiter(',');
    sweep_cmd->add_option("--method", sw_method, "Methods to run")->check(CLI::IsMember({"csi", "at", "both"}));
    sweep_cmd->add_option("--samples", sw_samples, "Grid positions evaluated (stratified)");
    sweep_cmd->add_option("--threads", sw_threads, "Worker threads (output does not depend on it)");
    sweep_cmd->add_option("--grid-h", sw_grid_h, "Grid positions across the AoI");
    sweep_cmd->add_option("--grid-v", sw_grid_v, "Grid positions along the AoI");
    sweep_cmd->add_option("--snr", sw_snr, "Add white noise at this SNR (dB)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*gen)
        {
            const auto map = street_map(scenario_kind_from_string(gm.kind));
            emit(gm.out, [&](std::ostream &os) { os << io::map_to_json(map).dump(2) << '\n'; });
            return 0;
        }

        if (*synth)
        {
            const auto rc = resolve_config(sy);
            const auto map = resolve_map(sy);
            std::vector<Point2> users;
            for (const auto &s : sy_pos)
                users.push_back(parse_point(s));
            if (!sy_positions.empty())
                for (const auto &p : read_positions(sy_positions))
                    users.push_back(p);
            if (users.empty())
                throw std::invalid_argument("synth needs --pos or --positions.");
            if (sy.out.empty())
                throw std::invalid_argument("synth needs --out DIR.");
            fs::create_directories(sy.out);

            std::mt19937_64 rng(sy_noise_seed);
            std::ofstream index(fs::path(sy.out) / "index.csv");
            index << "index,x,y,los,paths,file\n";
            for (std::size_t u = 0; u < users.size(); ++u)
            {
                const auto mpcs = enumerate_paths(map, users[u], rc.system, rc.max_order);
                auto h = synthesize_csi(mpcs, rc.system);
                if (sy_snr)
                    add_noise(h, *sy_snr, rng);
                char name[32];
                std::snprintf(name, sizeof name, "csi_%04zu.%s", u, sy_format == "json" ? "json" : "bin");
                io::save_csi(fs::path(sy.out) / name, h, rc.system);
                index << u << ',' << users[u].x << ',' << users[u].y << ',' << (line_of_sight(map, users[u]) ? 1 : 0)
                      << ',' << mpcs.size() << ',' << name << '\n';
            }
            return 0;
        }

        if (*loc)
        {
            auto rc = resolve_config(lo);
            const auto map = resolve_map(lo);
            const auto file = io::load_csi(lo_csi);
            rc.system.n_t = static_cast<int>(file.h.rows());
            rc.system.n_c = static_cast<int>(file.h.cols());
            rc.system.t_s = file.t_s;
            rc.system.wavelength = file.wavelength;
            rc.system.spacing = file.wavelength / 2.0;
            validate(rc.system);

            std::optional<Point2> truth;
            if (lo_truth)
                truth = parse_point(*lo_truth);
            try
            {
                const auto est = localize_csi(file.h, map, rc.system, rc.pipeline);
                emit(lo.out, [&](std::ostream &os) { os << io::diagnostics_to_json(est, &rc.system, truth).dump(2) << '\n'; });
            }
            catch (const UnlocalizableError &e)
            {
                nlohmann::json j{{"unlocalizable", true}, {"reason", e.what()}};
                emit(lo.out, [&](std::ostream &os) { os << j.dump(2) << '\n'; });
                return 3;
            }
            return 0;
        }

        if (*evaluate_cmd)
        {
            const auto rc = resolve_config(ev);
            const auto sc = scenario_from_map(resolve_map(ev), ev_grid_h, ev_grid_v);
            EvalOptions o;
            o.methods = parse_methods(ev_method);
            o.sample_limit = ev_samples;
            o.seed = rc.pipeline.seed;
            o.max_order = rc.max_order;
            o.snr_db = ev_snr;
            o.threads = ev_threads;
            const auto records = evaluate(sc, rc.system, rc.pipeline, o);
            emit(ev.out, [&](std::ostream &os) { write_records_csv(os, records); });
            if (!ev_summary.empty())
            {
                std::vector<SummaryRow> rows;
                for (const Method m : o.methods)
                    rows.push_back(summarize(records, m, rc.system.n_tt, rc.system.n_cc, "all"));
                emit(ev_summary, [&](std::ostream &os) { write_summary_csv(os, rows); });
            }
            return 0;
        }

        if (*sweep_cmd)
        {
            const auto rc = resolve_config(sw);
            const auto sc = scenario_from_map(resolve_map(sw), sw_grid_h, sw_grid_v);
            std::vector<std::pair<int, int>> sizes;
            if (sw_ntt.empty() && sw_ncc.empty())
                sizes = {{60, 60}, {120, 120}, {180, 180}};
            else if (sw_ncc.empty())
                for (int t : sw_ntt)
                    sizes.emplace_back(t, t);
            else if (sw_ntt.empty())
                for (int c : sw_ncc)
                    sizes.emplace_back(c, c);
            else if (sw_ntt.size() == sw_ncc.size())
                for (std::size_t i = 0; i < sw_ntt.size(); ++i)
                    sizes.emplace_back(sw_ntt[i], sw_ncc[i]);
            else
                for (int t : sw_ntt)
                    for (int c : sw_ncc)
                        sizes.emplace_back(t, c);

            EvalOptions o;
            o.methods = parse_methods(sw_method);
            o.sample_limit = sw_samples;
            o.seed = rc.pipeline.seed;
            o.max_order = rc.max_order;
            o.snr_db = sw_snr;
            o.threads = sw_threads;
            const auto rows = sweep(sc, rc.system, rc.pipeline, sizes, o);
            emit(sw.out, [&](std::ostream &os) { write_summary_csv(os, rows); });
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
