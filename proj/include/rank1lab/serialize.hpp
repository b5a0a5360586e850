#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "rank1lab/intcomb.hpp"
#include "rank1lab/interval_set.hpp"
#include "rank1lab/multipliers.hpp"
#include "rank1lab/tower.hpp"
#include "rank1lab/zd.hpp"

namespace rank1lab {

// JSON conventions used throughout: insertion-ordered objects with fixed key
// order, integers as numbers when they fit in 64 bits and as decimal strings
// otherwise, rationals as num/den integer pairs or "p/q" strings in lowest
// terms.  Emitters are deterministic, so equal values dump to equal bytes.

// { "name": str, "rule": str|null, "stages": [ { "r": int, "spacers": [...] } ] }
// A rule spec carries no explicit stages; the rule must name a preset.
nlohmann::ordered_json spec_to_json(const CutSpacerSpec& spec);
CutSpacerSpec spec_from_json(const nlohmann::ordered_json& j);

// bare element array when exactly finite, else
// { "elements": [...], "certified_bound": N }
nlohmann::ordered_json set_to_json(const SortedIntSet& s);
SortedIntSet set_from_json(const nlohmann::ordered_json& j);

// [ [num_a, den_a, num_b, den_b], ... ]
nlohmann::ordered_json intervals_to_json(const IntervalSet& s);
IntervalSet intervals_from_json(const nlohmann::ordered_json& j);

// { "style", "heights", "depth", "target_ids", "facts" }; facts are
// { "kind", "operands", "claim", "verified" } with operands kept verbatim
nlohmann::ordered_json certificate_to_json(const MultiplierCertificate& cert);
MultiplierCertificate certificate_from_json(const nlohmann::ordered_json& j);

// { "d": int, "a": [...], "heights": [...] }
nlohmann::ordered_json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::ordered_json& j);

// { "grid", "depth", "target_id", "facts" }
nlohmann::ordered_json zd_certificate_to_json(const ZdCertificate& cert);
ZdCertificate zd_certificate_from_json(const nlohmann::ordered_json& j);

// list of integer arrays, one per point
nlohmann::ordered_json points_to_json(const std::vector<std::vector<Integer>>& pts);

// text/file parsing; malformed input raises ParseError with position info
nlohmann::ordered_json parse_json_text(const std::string& text);
nlohmann::ordered_json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::ordered_json& j);

// CSV: one integer per line; realizations as level_index,left,right rows
std::string csv_ints(const std::vector<Integer>& xs);
std::string csv_realization(const std::vector<IntervalSet>& levels);

}  // namespace rank1lab
