#pragma once

#include "ivy/error.hpp"
#include "ivy/languages.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace testing_support {

inline const std::filesystem::path kRoot = IVY_SOURCE_DIR;
inline const std::filesystem::path kFixtures = kRoot / "fixtures";

inline const ivy::LanguageRegistry& registry() {
    static ivy::LanguageRegistry r = ivy::LanguageRegistry::load_manifest(ivy::default_language_manifest());
    return r;
}

}  // namespace testing_support

// Runs `stmt` and checks it throws ivy::Error with `expected` as its code.
#define EXPECT_IVY_ERROR(stmt, expected)                                      \
    do {                                                                      \
        try {                                                                 \
            stmt;                                                             \
            ADD_FAILURE() << "no exception from " #stmt;                      \
        } catch (const ivy::Error& e_) {                                      \
            EXPECT_EQ(ivy::code_name(e_.code()), ivy::code_name(expected))    \
                << e_.what();                                                 \
        }                                                                     \
    } while (0)
