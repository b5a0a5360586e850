#include "rank1lab/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "rank1lab/jsonio.hpp"

namespace rank1lab {

using nlohmann::ordered_json;

namespace {

std::vector<Integer> ints_from_json(const ordered_json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<Integer> out;
    for (const auto& v : j) out.push_back(integer_from_json(v));
    return out;
}

ordered_json facts_to_json(const std::vector<Fact>& facts) {
    auto arr = ordered_json::array();
    for (const auto& f : facts) {
        ordered_json fj;
        fj["kind"] = f.kind;
        fj["operands"] = f.operands;
        fj["claim"] = f.claim;
        fj["verified"] = f.verified;
        arr.push_back(std::move(fj));
    }
    return arr;
}

std::vector<Fact> facts_from_json(const ordered_json& j) {
    if (!j.is_array()) throw ParseError("facts must be an array");
    std::vector<Fact> out;
    for (const auto& fj : j) {
        if (!fj.is_object() || !fj.contains("kind") || !fj.contains("operands") ||
            !fj.contains("claim") || !fj.contains("verified"))
            throw ParseError("each fact needs kind, operands, claim and verified");
        Fact f;
        f.kind = fj.at("kind").get<std::string>();
        f.operands = fj.at("operands");
        f.claim = fj.at("claim").get<std::string>();
        f.verified = fj.at("verified").get<bool>();
        out.push_back(std::move(f));
    }
    return out;
}

int int_field(const ordered_json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field ") + key);
    auto v = to_int64(integer_from_json(j.at(key)));
    if (!v) throw ParseError(std::string(key) + " out of range");
    return static_cast<int>(*v);
}

}  // namespace

ordered_json spec_to_json(const CutSpacerSpec& spec) {
    ordered_json j;
    j["name"] = spec.name();
    if (spec.rule_name())
        j["rule"] = *spec.rule_name();
    else
        j["rule"] = nullptr;
    auto stages = ordered_json::array();
    for (int i = 0; i < spec.explicit_stage_count(); ++i) {
        auto st = spec.stage(i);
        ordered_json sj;
        sj["r"] = st.r;
        sj["spacers"] = json_ints(st.spacers);
        stages.push_back(std::move(sj));
    }
    j["stages"] = std::move(stages);
    return j;
}

CutSpacerSpec spec_from_json(const ordered_json& j) {
    if (!j.is_object()) throw ParseError("spec must be a JSON object");
    if (!j.contains("name") || !j.at("name").is_string())
        throw ParseError("spec needs a string name");
    std::string name = j.at("name").get<std::string>();
    bool has_rule = j.contains("rule") && !j.at("rule").is_null();
    if (has_rule && !j.at("rule").is_string()) throw ParseError("rule must be a string or null");
    if (!j.contains("stages") || !j.at("stages").is_array())
        throw ParseError("spec needs a stages array");
    std::vector<Stage> stages;
    for (const auto& sj : j.at("stages")) {
        if (!sj.is_object() || !sj.contains("r") || !sj.contains("spacers"))
            throw ParseError("each stage needs r and spacers");
        Stage st;
        auto r = to_int64(integer_from_json(sj.at("r")));
        if (!r) throw ParseError("cut count out of range");
        st.r = static_cast<int>(*r);
        st.spacers = ints_from_json(sj.at("spacers"), "spacers");
        stages.push_back(std::move(st));
    }
    if (has_rule) {
        std::string rule = j.at("rule").get<std::string>();
        if (!stages.empty()) throw ParseError("a rule spec carries no explicit stages");
        auto spec = CutSpacerSpec::preset(rule);
        if (spec.name() != name) throw ParseError("a preset spec must use the preset name");
        return spec;
    }
    if (stages.empty()) throw ParseError("a spec without a rule needs at least one stage");
    try {
        return CutSpacerSpec::from_stages(std::move(name), std::move(stages));
    } catch (const std::invalid_argument& e) {
        throw InvariantViolation(e.what());
    }
}

ordered_json set_to_json(const SortedIntSet& s) {
    if (s.exactly_finite()) return json_ints(s.elements());
    ordered_json j;
    j["elements"] = json_ints(s.elements());
    j["certified_bound"] = json_int(*s.certified_bound());
    return j;
}

SortedIntSet set_from_json(const ordered_json& j) {
    if (j.is_array()) return SortedIntSet::from_elements(ints_from_json(j, "set"));
    if (!j.is_object() || !j.contains("elements") || !j.contains("certified_bound"))
        throw ParseError("set must be an array or carry elements and certified_bound");
    try {
        return SortedIntSet::from_elements(ints_from_json(j.at("elements"), "elements"),
                                           integer_from_json(j.at("certified_bound")));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

ordered_json intervals_to_json(const IntervalSet& s) {
    auto arr = ordered_json::array();
    for (const auto& [a, b] : s.intervals()) {
        auto row = ordered_json::array();
        row.push_back(json_int(Integer(a.get_num())));
        row.push_back(json_int(Integer(a.get_den())));
        row.push_back(json_int(Integer(b.get_num())));
        row.push_back(json_int(Integer(b.get_den())));
        arr.push_back(std::move(row));
    }
    return arr;
}

IntervalSet intervals_from_json(const ordered_json& j) {
    if (!j.is_array()) throw ParseError("interval set must be an array");
    std::vector<IntervalSet::Interval> ivs;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != 4)
            throw ParseError("each interval is [num_a, den_a, num_b, den_b]");
        Integer na = integer_from_json(row[0]), da = integer_from_json(row[1]);
        Integer nb = integer_from_json(row[2]), db = integer_from_json(row[3]);
        if (da == 0 || db == 0) throw ParseError("interval endpoint with zero denominator");
        ivs.emplace_back(make_rational(na, da), make_rational(nb, db));
    }
    try {
        return IntervalSet::from_intervals(std::move(ivs));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

ordered_json certificate_to_json(const MultiplierCertificate& cert) {
    ordered_json j;
    j["style"] = to_string(cert.style);
    j["heights"] = json_ints(cert.heights);
    j["depth"] = cert.depth;
    j["target_ids"] = cert.target_ids;
    j["facts"] = facts_to_json(cert.facts);
    return j;
}

MultiplierCertificate certificate_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("style") || !j.at("style").is_string())
        throw ParseError("certificate needs a style string");
    MultiplierCertificate cert;
    cert.style = cert_style_from_string(j.at("style").get<std::string>());
    if (!j.contains("heights")) throw ParseError("certificate needs heights");
    cert.heights = ints_from_json(j.at("heights"), "heights");
    cert.depth = int_field(j, "depth");
    if (!j.contains("target_ids") || !j.at("target_ids").is_array())
        throw ParseError("certificate needs a target_ids array");
    for (const auto& t : j.at("target_ids")) {
        if (!t.is_string()) throw ParseError("target ids must be strings");
        cert.target_ids.push_back(t.get<std::string>());
    }
    if (!j.contains("facts")) throw ParseError("certificate needs facts");
    cert.facts = facts_from_json(j.at("facts"));
    return cert;
}

ordered_json grid_to_json(const GridSpec& grid) {
    ordered_json j;
    j["d"] = grid.d;
    j["a"] = json_ints(grid.direction);
    j["heights"] = json_ints(grid.heights);
    return j;
}

GridSpec grid_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("a") || !j.contains("heights"))
        throw ParseError("grid needs d, a and heights");
    GridSpec g;
    g.d = int_field(j, "d");
    g.direction = ints_from_json(j.at("a"), "a");
    g.heights = ints_from_json(j.at("heights"), "heights");
    try {
        validate_grid(g);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return g;
}

ordered_json zd_certificate_to_json(const ZdCertificate& cert) {
    ordered_json j;
    j["grid"] = grid_to_json(cert.grid);
    j["depth"] = cert.depth;
    j["target_id"] = cert.target_id;
    j["facts"] = facts_to_json(cert.facts);
    return j;
}

ZdCertificate zd_certificate_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("grid") || !j.contains("target_id") ||
        !j.at("target_id").is_string())
        throw ParseError("zd certificate needs grid and target_id");
    ZdCertificate cert;
    cert.grid = grid_from_json(j.at("grid"));
    cert.depth = int_field(j, "depth");
    cert.target_id = j.at("target_id").get<std::string>();
    if (!j.contains("facts")) throw ParseError("zd certificate needs facts");
    cert.facts = facts_from_json(j.at("facts"));
    return cert;
}

ordered_json points_to_json(const std::vector<std::vector<Integer>>& pts) {
    auto arr = ordered_json::array();
    for (const auto& p : pts) arr.push_back(json_ints(p));
    return arr;
}

ordered_json parse_json_text(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

ordered_json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_json_text(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string csv_ints(const std::vector<Integer>& xs) {
    std::string out;
    for (const auto& x : xs) {
        out += to_string(x);
        out += '\n';
    }
    return out;
}

std::string csv_realization(const std::vector<IntervalSet>& levels) {
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (const auto& [a, b] : levels[i].intervals()) {
            out += std::to_string(i);
            out += ',';
            out += to_string(a);
            out += ',';
            out += to_string(b);
            out += '\n';
        }
    return out;
}

}  // namespace rank1lab
