#pragma once

#include <vector>

#include "errors.hpp"

namespace tasep {

// Which way the Fredholm projector points. GEQ_event is the form
// P(all x_{sigma(k)} >= a_k) with chi_a = 1(x < a_k); it is the convention the
// enumeration oracle validates and the shipped default. LEQ_event keeps the
// mirrored reading selectable.
enum class EventConvention { GEQ_event, LEQ_event };

struct JointQuery {
  std::vector<int> indices;           // sigma(1) < ... < sigma(m), 1-based
  std::vector<long long> thresholds;  // a_1 ... a_m
  EventConvention convention = EventConvention::GEQ_event;

  void validate() const {
    if (indices.empty() || indices.size() != thresholds.size())
      throw ValidationError("JointQuery: need equally many indices and thresholds");
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (indices[k] < 1) throw ValidationError("JointQuery: indices must be >= 1");
      if (k > 0 && indices[k] <= indices[k - 1])
        throw ValidationError("JointQuery: indices must be strictly increasing");
    }
  }
};

}  // namespace tasep
