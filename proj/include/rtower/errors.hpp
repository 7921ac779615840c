#pragma once

#include <stdexcept>
#include <string>

namespace rtower {

// Elements from two towers whose radicand lists disagree on a level both use.
class context_mismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class division_by_zero : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input violates an operation's precondition (degenerate quadratic, bad class, ...).
class degenerate_input : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// det(G) = 0: the Jacobian is isogenous to a product of elliptic curves.
class split_jacobian : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A mathematical guarantee failed at run time. Never repaired silently.
class invariant_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class resource_limit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rtower
