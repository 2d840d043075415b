#include <gtest/gtest.h>

#include "crevtax/digest.hpp"
#include "crevtax/text.hpp"

using namespace crevtax;

TEST(Text, TrimWrappingStripsPunctuationAndSpace) {
    EXPECT_EQ(text::trim_wrapping("  \"Praise.\"  "), "Praise");
    EXPECT_EQ(text::trim_wrapping("**Logical**"), "Logical");
    EXPECT_EQ(text::trim_wrapping(" .,; "), "");
    EXPECT_EQ(text::trim_wrapping("a b"), "a b");
}

TEST(Text, NormalizeNameCollapsesAndLowers) {
    EXPECT_EQ(text::normalize_name("  Visual\t\n Representation "), "visual representation");
    EXPECT_TRUE(text::iequals("CODE Organization", "code organization"));
    EXPECT_FALSE(text::iequals("code", "codes"));
}

TEST(Text, Utf8FloorNeverSplitsSequences) {
    const std::string s = "a\xC3\xA9z";  // a, e-acute (2 bytes), z
    EXPECT_EQ(text::utf8_floor(s, 0), 0u);
    EXPECT_EQ(text::utf8_floor(s, 1), 1u);
    EXPECT_EQ(text::utf8_floor(s, 2), 1u);
    EXPECT_EQ(text::utf8_floor(s, 3), 3u);
    EXPECT_EQ(text::utf8_floor(s, 10), s.size());
}

TEST(Text, WordBoundary) {
    const std::string s = "is Logical, not Illogical";
    EXPECT_TRUE(text::is_word_boundary(s, 3, 10));
    EXPECT_FALSE(text::is_word_boundary(s, 18, 25));
    EXPECT_TRUE(text::is_word_boundary(s, 0, 2));
}

TEST(Digest, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Digest, BoundedDrawStaysInRangeAndCoversIt) {
    std::mt19937_64 rng(7);
    std::array<int, 17> seen{};
    for (int i = 0; i < 17000; ++i) {
        const auto v = bounded_draw(rng, 17);
        ASSERT_LT(v, 17u);
        ++seen[v];
    }
    for (int c : seen) EXPECT_GT(c, 800);
}
