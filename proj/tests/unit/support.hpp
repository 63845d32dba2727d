#pragma once

#include <cmath>
#include <functional>

#include "doctest.h"
#include "fraclab/errors.hpp"

// Runs f and reports the ErrorKind it threw; CHECKs fail when nothing (or something else) was thrown.
inline bool throws_kind(const std::function<void()>& f, fraclab::ErrorKind kind) {
    try {
        f();
    } catch (const fraclab::Error& e) {
        return e.kind() == kind;
    }
    return false;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }
