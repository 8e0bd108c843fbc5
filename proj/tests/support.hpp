#pragma once

#include <doctest.h>

#include "fluctuator/error.hpp"

// Runs `expr` and checks that it throws fluct::Error of the given kind.
#define CHECK_THROWS_KIND(expr, k)                        \
  do {                                                    \
    bool thrown_ = false;                                 \
    try {                                                 \
      (void)(expr);                                       \
    } catch (const fluct::Error& e_) {                    \
      thrown_ = true;                                     \
      CHECK_MESSAGE(e_.kind() == (k), e_.what());         \
    }                                                     \
    CHECK_MESSAGE(thrown_, "expected fluct::Error: " #k); \
  } while (0)
