#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "ncycle/box_io.h"
#include "ncycle/error.h"

using namespace ncycle;

namespace {

bool bit_equal(const Box &a, const Box &b) {
    return a.n() == b.n() && a.d() == b.d() && a.label() == b.label() &&
           std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(double)) == 0;
}

}  // namespace

TEST(BoxIoProperty, RoundTripIsBitExact) {
    for (int n = 3; n <= 8; n++) {
        for (std::uint64_t s = 0; s < 40; s++) {
            Box b = (s % 2 ? random_ns_box(n, s) : random_pr_weighted_box(n, s)).with_label("sample " + std::to_string(s));
            Box back = parse_box(serialize_box(b));
            EXPECT_TRUE(bit_equal(b, back));
        }
    }
    Box w = white_noise(4, 3).with_label("");
    EXPECT_TRUE(bit_equal(w, parse_box(serialize_box(w))));
}

TEST(BoxIoProperty, AwkwardDoublesSurvive) {
    // Entries with long expansions, subnormal-sized offsets and exact halves.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 200; t++) {
        double x = u(rng), y = u(rng) * (1 - x);
        double tiny = t % 3 == 0 ? 5e-324 : 0.0;
        std::vector<double> p;
        for (int i = 0; i < 3; i++) {
            p.insert(p.end(), {x, y - tiny, tiny, 1 - x - y});
        }
        Box b(3, 2, p, 1e-9);
        EXPECT_TRUE(bit_equal(b, parse_box(serialize_box(b))));
    }
}

TEST(BoxIo, FieldDiagnostics) {
    auto message = [](const std::string &text) {
        try {
            parse_box(text);
        } catch (const DataError &e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("{\"d\":2,\"edges\":[]}").find("'n'"), std::string::npos);
    EXPECT_NE(message("{\"n\":3.5,\"d\":2,\"edges\":[]}").find("integer"), std::string::npos);
    EXPECT_NE(message("{\"n\":3,\"d\":2,\"edges\":[[1,0,0,0]]}").find("expected n = 3"), std::string::npos);
    EXPECT_NE(message("{\"n\":3,\"d\":2,\"edges\":[[1,0,0,0],[1,0,0],[1,0,0,0]]}").find("edges[1]"),
              std::string::npos);
    EXPECT_NE(message("{\"n\":3,\"d\":2,\"edges\":[[1,0,0,0],[1,0,0,\"x\"],[1,0,0,0]]}").find("edges[1][3]"),
              std::string::npos);
    EXPECT_NE(message("{\"n\":3,\"d\":2,\"edges\":[[1,0,0,0],[1,0,0,0],[0.5,0,0,0]]}"), "no error");
    EXPECT_NE(message("{\"n\": 3,\n \"d\": 2,\n ]").find("line 3"), std::string::npos);
    EXPECT_NE(message("[1,2]").find("object"), std::string::npos);
}

TEST(BoxIo, FilesAndAtomicWrites) {
    auto dir = std::filesystem::temp_directory_path() / "ncycle_box_io_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "pr.json";
    Box pr = pr_box(Gamma::canonical(5)).with_label("pr5");
    write_text_atomically(path, serialize_box(pr));
    EXPECT_FALSE(std::filesystem::exists(dir / "pr.json.tmp"));
    EXPECT_TRUE(bit_equal(read_box_file(path), pr));
    EXPECT_THROW(read_box_file(dir / "missing.json"), DataError);
    std::filesystem::remove_all(dir);
}
