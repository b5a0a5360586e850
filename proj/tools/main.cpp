#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rank1lab/dynamics.hpp"
#include "rank1lab/jsonio.hpp"
#include "rank1lab/multipliers.hpp"
#include "rank1lab/serialize.hpp"
#include "rank1lab/tower.hpp"
#include "rank1lab/zd.hpp"

using namespace rank1lab;
using nlohmann::ordered_json;

namespace {

// stdout payload plus optional copy to --out; json via dump keeps output
// byte-identical across runs
void emit(const ordered_json& doc, const std::string& format, const std::string& out_path,
          const std::string& text, const std::string& csv) {
    if (!out_path.empty()) save_json_file(out_path, doc);
    if (format == "json")
        std::cout << doc.dump(2) << "\n";
    else if (format == "csv")
        std::cout << csv;
    else
        std::cout << text;
}

CutSpacerSpec one_spec(const std::string& preset, const std::string& path) {
    if (preset.empty() == path.empty())
        throw std::invalid_argument("give exactly one of --preset / --spec");
    if (!preset.empty()) return CutSpacerSpec::preset(preset);
    return spec_from_json(load_json_file(path));
}

struct Targets {
    std::vector<std::unique_ptr<GapOracle>> own;
    std::vector<GapOracle*> ptrs;
};

Targets gather_targets(const std::vector<std::string>& presets,
                       const std::vector<std::string>& specs,
                       const std::vector<std::string>& sets) {
    Targets t;
    for (const auto& p : presets)
        t.own.push_back(std::make_unique<TowerGapOracle>(CutSpacerSpec::preset(p)));
    for (const auto& s : specs)
        t.own.push_back(std::make_unique<TowerGapOracle>(spec_from_json(load_json_file(s))));
    for (const auto& s : sets)
        t.own.push_back(std::make_unique<FixedSetOracle>(set_from_json(load_json_file(s)), s));
    if (t.own.empty()) throw std::invalid_argument("no targets given");
    for (auto& o : t.own) t.ptrs.push_back(o.get());
    return t;
}

std::vector<Integer> to_integers(const std::vector<long>& xs) { return {xs.begin(), xs.end()}; }

std::string csv_points(const std::vector<std::vector<Integer>>& pts) {
    std::string out;
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i) out += ',';
            out += to_string(p[i]);
        }
        out += '\n';
    }
    return out;
}

ordered_json stall_doc(const std::string& what, int stage, const ordered_json& partial) {
    ordered_json doc;
    doc["error"] = what;
    doc["stage_reached"] = stage;
    doc["partial"] = partial;
    return doc;
}

ordered_json report_doc(const VerifyReport& rep) {
    ordered_json doc;
    doc["ok"] = rep.ok;
    doc["fact_ok"] = rep.fact_ok;
    doc["failures"] = rep.failures;
    return doc;
}

int emit_report(const VerifyReport& rep, const std::string& format, const std::string& out) {
    std::string text = rep.ok ? "ok\n" : "FAILED\n";
    for (const auto& f : rep.failures) text += "  " + f + "\n";
    std::string csv;
    for (std::size_t i = 0; i < rep.fact_ok.size(); ++i)
        csv += std::to_string(i) + "," + (rep.fact_ok[i] ? "1" : "0") + "\n";
    emit(report_doc(rep), format, out, text, csv);
    return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank-one cut-and-stack construction laboratory"};
    app.require_subcommand(1);
    std::string format = "text", out_path;
    app.add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--out", out_path, "also write the json document here");

    std::string preset, spec_path, cert_path, style = "skyscraper", kind = "thm41";
    std::vector<std::string> presets, spec_paths, set_paths, axis_paths;
    std::string target_id = "target";
    int stages = 6, stage = 3, upto = 6, depth = 4, budget = 3, rigidity_depth = 4;
    int column = 1, terms = 8, max_j = 3;
    long level = 0, window = 0, half_width = 0, min_height = 1;
    std::vector<long> multipliers{1}, direction{1};

    auto* heights_cmd = app.add_subcommand("heights", "column heights of a construction");
    heights_cmd->add_option("--preset", preset);
    heights_cmd->add_option("--spec", spec_path);
    heights_cmd->add_option("--stages", stages)->check(CLI::NonNegativeNumber);

    auto* consets_cmd = app.add_subcommand("consets", "truncated conservative set of a level");
    consets_cmd->add_option("--preset", preset);
    consets_cmd->add_option("--spec", spec_path);
    consets_cmd->add_option("--stage", stage)->check(CLI::PositiveNumber);
    consets_cmd->add_option("--column", column)->check(CLI::PositiveNumber);
    consets_cmd->add_option("--level", level);

    auto* oracle_cmd =
        app.add_subcommand("oracle", "dynamical return times checked against the combinatorial set");
    oracle_cmd->add_option("--preset", preset);
    oracle_cmd->add_option("--spec", spec_path);
    oracle_cmd->add_option("--window", window)->required();
    oracle_cmd->add_option("--column", column)->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--level", level);

    auto* gaps_cmd = app.add_subcommand("gaps", "least height clearing all multiplier windows");
    gaps_cmd->add_option("--preset", preset);
    gaps_cmd->add_option("--spec", spec_path);
    gaps_cmd->add_option("--half-width", half_width)->required();
    gaps_cmd->add_option("--min-height", min_height);
    gaps_cmd->add_option("--multipliers", multipliers)->delimiter(',');

    auto* cond_cmd = app.add_subcommand("verify-condition", "per-stage growth condition table");
    cond_cmd->add_option("--preset", preset);
    cond_cmd->add_option("--spec", spec_path);
    cond_cmd->add_option("--kind", kind)
        ->check(CLI::IsMember({"thm41", "cor_half", "cor_telescoped"}));
    cond_cmd->add_option("--upto", upto)->check(CLI::PositiveNumber);

    auto* build_cmd = app.add_subcommand("build", "run a construction and emit its certificate");
    build_cmd->add_option("--style", style)
        ->check(CLI::IsMember({"skyscraper", "rigid", "iei", "family", "thm41", "ergodic"}));
    build_cmd->add_option("--preset", presets);
    build_cmd->add_option("--spec", spec_paths);
    build_cmd->add_option("--set", set_paths);
    build_cmd->add_option("--depth", depth)->check(CLI::PositiveNumber);
    build_cmd->add_option("--budget", budget)->check(CLI::PositiveNumber);
    build_cmd->add_option("--rigidity-depth", rigidity_depth);
    build_cmd->add_option("--window", window);

    auto* vc_cmd = app.add_subcommand("verify-cert", "re-run a certificate against its targets");
    vc_cmd->add_option("--cert", cert_path)->required();
    vc_cmd->add_option("--preset", presets);
    vc_cmd->add_option("--spec", spec_paths);
    vc_cmd->add_option("--set", set_paths);

    auto* zd_cmd = app.add_subcommand("zd", "product constructions over a grid");
    zd_cmd->require_subcommand(1);
    auto* zd_consets = zd_cmd->add_subcommand("consets", "stage returns of a grid");
    std::string grid_path;
    zd_consets->add_option("--grid", grid_path)->required();
    zd_consets->add_option("--stage", stage)->check(CLI::PositiveNumber);
    auto* zd_build = zd_cmd->add_subcommand("build", "multi-axis avoidance build");
    zd_build->add_option("--axes", axis_paths)->delimiter(',')->required();
    zd_build->add_option("--direction", direction)->delimiter(',');
    zd_build->add_option("--depth", depth)->check(CLI::PositiveNumber);
    zd_build->add_option("--target-id", target_id);
    zd_build->add_option("--window", window);
    auto* zd_verify = zd_cmd->add_subcommand("verify", "re-run a grid certificate");
    zd_verify->add_option("--cert", cert_path)->required();
    zd_verify->add_option("--axes", axis_paths)->delimiter(',')->required();

    auto* dist_cmd = app.add_subcommand("distance", "weak distance enclosure between two builds");
    dist_cmd->add_option("--preset", presets);
    dist_cmd->add_option("--spec", spec_paths);
    dist_cmd->add_option("--terms", terms)->check(CLI::PositiveNumber);
    dist_cmd->add_option("--max-j", max_j)->check(CLI::NonNegativeNumber);

    // --format / --out live on the root; let every verb reach them
    for (auto* sc : {heights_cmd, consets_cmd, oracle_cmd, gaps_cmd, cond_cmd, build_cmd, vc_cmd,
                     zd_cmd, zd_consets, zd_build, zd_verify, dist_cmd})
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(heights_cmd)) {
            auto spec = one_spec(preset, spec_path);
            auto hs = spec.heights(stages);
            std::string lines = csv_ints(hs);
            emit(json_ints(hs), format, out_path, lines, lines);
        } else if (app.got_subcommand(consets_cmd)) {
            auto spec = one_spec(preset, spec_path);
            auto set = conservative_set_trunc(spec, {column, Integer(level)}, stage);
            std::string text;
            for (const auto& x : set.elements()) text += to_string(x) + "\n";
            emit(set_to_json(set), format, out_path, text, csv_ints(set.elements()));
        } else if (app.got_subcommand(oracle_cmd)) {
            auto spec = one_spec(preset, spec_path);
            LevelId lvl{column, Integer(level)};
            Integer w(window);
            DynamicsEngine engine(spec);
            auto clip = [&w](const SortedIntSet& s) {
                std::vector<Integer> v;
                for (const auto& e : s.elements()) {
                    Integer a = e < 0 ? Integer(-e) : Integer(e);
                    if (a <= w) v.push_back(e);
                }
                return v;
            };
            auto dyn = clip(engine.conservative_seq(lvl, w));
            auto comb = clip(conservative_set_trunc(spec, lvl, truncation_stage(spec, lvl, w)));
            ordered_json doc;
            doc["window"] = json_int(w);
            doc["returns"] = json_ints(dyn);
            doc["match"] = dyn == comb;
            std::string text;
            for (const auto& x : dyn) text += to_string(x) + "\n";
            text += std::string("match: ") + (dyn == comb ? "true" : "false") + "\n";
            emit(doc, format, out_path, text, csv_ints(dyn));
        } else if (app.got_subcommand(gaps_cmd)) {
            auto spec = one_spec(preset, spec_path);
            TowerGapOracle target(spec);
            Integer l = find_gap(target, Integer(half_width), to_integers(multipliers),
                                 Integer(min_height));
            ordered_json doc;
            doc["gap"] = json_int(l);
            emit(doc, format, out_path, to_string(l) + "\n", to_string(l) + "\n");
        } else if (app.got_subcommand(cond_cmd)) {
            auto spec = one_spec(preset, spec_path);
            ConditionKind ck = kind == "thm41"      ? ConditionKind::thm41
                               : kind == "cor_half" ? ConditionKind::cor_half
                                                    : ConditionKind::cor_telescoped;
            auto rows = check_condition(spec, ck, upto);
            ordered_json doc = ordered_json::array();
            std::string text, csv;
            bool all = true;
            for (const auto& r : rows) {
                ordered_json rj;
                rj["stage"] = r.stage;
                rj["holds"] = r.holds;
                rj["lhs"] = json_int(r.lhs);
                rj["rhs"] = json_int(r.rhs);
                doc.push_back(std::move(rj));
                text += "stage " + std::to_string(r.stage) + ": " + to_string(r.lhs) + " vs " +
                        to_string(r.rhs) + (r.holds ? " ok" : " VIOLATED") + "\n";
                csv += std::to_string(r.stage) + "," + (r.holds ? "1" : "0") + "," +
                       to_string(r.lhs) + "," + to_string(r.rhs) + "\n";
                all = all && r.holds;
            }
            emit(doc, format, out_path, text, csv);
            return all ? 0 : 1;
        } else if (app.got_subcommand(build_cmd)) {
            CertStyle cs = cert_style_from_string(style);
            MultiplierCertificate cert;
            try {
                if (cs == CertStyle::thm41 || cs == CertStyle::ergodic) {
                    if (!set_paths.empty() || presets.size() + spec_paths.size() != 1)
                        throw std::invalid_argument("this style takes exactly one --preset/--spec");
                    auto spec = presets.empty() ? spec_from_json(load_json_file(spec_paths[0]))
                                                : CutSpacerSpec::preset(presets[0]);
                    cert = cs == CertStyle::thm41 ? build_thm41(spec, depth, rigidity_depth)
                                                  : build_ergodic(spec, budget);
                } else {
                    auto targets = gather_targets(presets, spec_paths, set_paths);
                    Integer w(window);
                    if (cs == CertStyle::family) {
                        cert = build_avoiding_family(targets.ptrs, depth, w);
                    } else {
                        if (targets.ptrs.size() != 1)
                            throw std::invalid_argument("this style takes exactly one target");
                        auto& t = *targets.ptrs[0];
                        cert = cs == CertStyle::skyscraper ? build_avoiding_skyscraper(t, depth, w)
                               : cs == CertStyle::rigid    ? build_avoiding_rigid(t, depth, w)
                                                           : build_avoiding_iei(t, depth, w);
                    }
                }
            } catch (const ConstructionStalled& e) {
                emit(stall_doc(e.what(), e.stage_reached, certificate_to_json(e.partial)), "json",
                     out_path, "", "");
                return 1;
            }
            std::string text = "style " + to_string(cert.style) + ", depth " +
                               std::to_string(cert.depth) + ", " + std::to_string(cert.facts.size()) +
                               " facts\n" + csv_ints(cert.heights);
            emit(certificate_to_json(cert), format, out_path, text, csv_ints(cert.heights));
        } else if (app.got_subcommand(vc_cmd)) {
            auto cert = certificate_from_json(load_json_file(cert_path));
            VerifyReport rep;
            if (cert.style == CertStyle::thm41 || cert.style == CertStyle::ergodic) {
                if (!set_paths.empty() || presets.size() + spec_paths.size() != 1)
                    throw std::invalid_argument("this style verifies against one --preset/--spec");
                auto spec = presets.empty() ? spec_from_json(load_json_file(spec_paths[0]))
                                            : CutSpacerSpec::preset(presets[0]);
                rep = verify_certificate(cert, spec);
            } else {
                auto targets = gather_targets(presets, spec_paths, set_paths);
                rep = verify_certificate(cert, targets.ptrs);
            }
            return emit_report(rep, format, out_path);
        } else if (app.got_subcommand(zd_cmd)) {
            if (zd_cmd->got_subcommand(zd_consets)) {
                auto grid = grid_from_json(load_json_file(grid_path));
                auto pts = zd_conservative_set(grid, stage).materialize();
                emit(points_to_json(pts), format, out_path, csv_points(pts), csv_points(pts));
            } else {
                std::vector<SortedIntSet> axes;
                for (const auto& p : axis_paths) axes.push_back(set_from_json(load_json_file(p)));
                auto target = ProductLatticeSet::from_axes(std::move(axes));
                if (zd_cmd->got_subcommand(zd_build)) {
                    ZdCertificate cert;
                    try {
                        cert = build_zd_skyscraper(target, to_integers(direction), depth,
                                                   target_id, Integer(window));
                    } catch (const ZdConstructionStalled& e) {
                        emit(stall_doc(e.what(), e.stage_reached,
                                       zd_certificate_to_json(e.partial)),
                             "json", out_path, "", "");
                        return 1;
                    }
                    std::string text = "grid d=" + std::to_string(cert.grid.d) + ", " +
                                       std::to_string(cert.facts.size()) + " facts\n" +
                                       csv_ints(cert.grid.heights);
                    emit(zd_certificate_to_json(cert), format, out_path, text,
                         csv_ints(cert.grid.heights));
                } else {
                    auto cert = zd_certificate_from_json(load_json_file(cert_path));
                    return emit_report(verify_zd_certificate(cert, target), format, out_path);
                }
            }
        } else if (app.got_subcommand(dist_cmd)) {
            if (presets.size() + spec_paths.size() != 2)
                throw std::invalid_argument("distance needs exactly two --preset/--spec targets");
            std::vector<CutSpacerSpec> specs;
            for (const auto& p : presets) specs.push_back(CutSpacerSpec::preset(p));
            for (const auto& p : spec_paths) specs.push_back(spec_from_json(load_json_file(p)));
            DynamicsEngine t(specs[0]), s(specs[1]);
            auto enc = weak_distance(t, s, terms, max_j);
            ordered_json doc;
            doc["lower"] = to_string(enc.lower);
            doc["upper"] = to_string(enc.upper);
            emit(doc, format, out_path,
                 "lower " + to_string(enc.lower) + "\nupper " + to_string(enc.upper) + "\n",
                 to_string(enc.lower) + "," + to_string(enc.upper) + "\n");
        }
    } catch (const ConditionViolated& e) {
        ordered_json doc;
        doc["error"] = e.what();
        doc["stage"] = e.stage;
        std::cout << doc.dump(2) << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownPreset& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        ordered_json doc;
        doc["error"] = e.what();
        std::cout << doc.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
