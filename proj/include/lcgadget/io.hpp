#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lcgadget/classify.hpp"
#include "lcgadget/gadget.hpp"
#include "lcgadget/labelcover.hpp"

namespace lcg {

using json = nlohmann::json;

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

// {"vid": label, ...}
json labeling_to_json(const Labeling& sigma);
Labeling labeling_from_json(const json& j, std::uint32_t num_vertices);

json params_to_json(const GadgetParams& p);
// Keys present in `j` override `base`; any override clears `faithful`.
GadgetParams params_from_json(const json& j, GadgetParams base);

json transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const json& j);

// {"a", "edge", "x": [[v,i,q],...], "y": [...], "transcript"?}
json point_to_json(const SamplePoint& p, bool with_transcript);
SamplePoint point_from_json(const json& j);

json halfspace_to_json(const Halfspace& h);
Halfspace halfspace_from_json(const json& j);

json classifier_to_json(const Classifier& c);
Classifier classifier_from_json(const json& j);

// A coefficient file is either one halfspace or {"halfspaces": [...]}.
std::vector<Halfspace> halfspaces_from_json(const json& j);

json read_json_file(const std::string& path);
std::vector<json> read_jsonl_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Flattens nested objects/arrays to "a.b.0,value" rows, keys sorted.
std::string json_to_csv(const json& j);

} // namespace lcg
