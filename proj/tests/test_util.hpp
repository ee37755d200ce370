#pragma once

#include "doctest.h"

#include "dynrg/error.hpp"

// Kind of the dynrg::Error thrown by fn; fails the test when nothing is thrown.
template <class Fn>
dynrg::ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const dynrg::Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return dynrg::ErrorKind::config;
}
