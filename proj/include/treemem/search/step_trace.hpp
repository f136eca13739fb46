#pragma once

#include "treemem/search/beam_search.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

namespace treemem::search {

/// {"object_id","time","uncertain","leaf_scores","leaf_ious","parents","candidates"}
nlohmann::json step_trace_json(int object_id, const StepTrace& trace);

/// Appends one NDJSON line for `trace`.
void write_step_trace(std::ostream& out, int object_id, const StepTrace& trace);

}  // namespace treemem::search
