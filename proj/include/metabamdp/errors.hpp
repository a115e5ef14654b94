#ifndef METABAMDP_ERRORS_HPP
#define METABAMDP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mbamdp {

/// A configured size cap (belief lattice, meta-graph, oracle budget) was exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A policy was queried on a meta-state it does not define.
class MissingPolicyState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mbamdp

#endif
