#pragma once

#include <gtest/gtest.h>

#include "credcurve/error.hpp"

// Expects `stmt` to throw credcurve::Error carrying `expected_code`.
#define EXPECT_ERROR_CODE(stmt, expected_code)                                      \
    do {                                                                            \
        try {                                                                       \
            stmt;                                                                   \
            ADD_FAILURE() << "no exception from " #stmt;                           \
        } catch (const credcurve::Error& e) {                                       \
            EXPECT_EQ(e.code(), expected_code) << e.what();                         \
        }                                                                           \
    } while (0)
