#include "treemem/search/step_trace.hpp"

namespace treemem::search {

nlohmann::json step_trace_json(int object_id, const StepTrace& trace) {
    return {
        {"object_id", object_id},
        {"time", trace.time},
        {"uncertain", trace.uncertain},
        {"leaf_scores", trace.leaf_scores},
        {"leaf_ious", trace.leaf_ious},
        {"parents", trace.parent_positions},
        {"candidates", trace.candidate_indices},
    };
}

void write_step_trace(std::ostream& out, int object_id, const StepTrace& trace) {
    out << step_trace_json(object_id, trace).dump() << '\n';
}

}  // namespace treemem::search
