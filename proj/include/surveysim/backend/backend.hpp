#pragma once

#include "surveysim/backend/types.hpp"

namespace surveysim::backend {

// Generation contract every survey response generation method runs against.
// Implementations are safe to call from many threads at once.
class Backend {
public:
    virtual ~Backend() = default;

    virtual Capabilities capabilities() const = 0;

    // Throws BackendError. Text obeys the request's constraint when one is set.
    virtual GenerationResult generate(const GenerationRequest& request) = 0;
};

}  // namespace surveysim::backend
