#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "harness_tools.hpp"

using namespace toolmem;
using namespace toolmem::harness;

namespace {

const std::string kFixtures = TOOLMEM_FIXTURE_DIR;

Value grid_for(const std::string& smiles, int dim) {
    GridConfig config{dim};
    return generate_molecule_grid(Value{{"molecule_description", smiles}}, config);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("smiles_seed is a pure function of the string") {
    CHECK(smiles_seed("CCO") == smiles_seed("CCO"));
    CHECK(smiles_seed("CCO") != smiles_seed("CCN"));
    CHECK(smiles_seed("") != smiles_seed("C"));
}

TEST_CASE("grid elements are bounded dyadic rationals, exact in float32") {
    std::uint64_t seed = smiles_seed("OC12COC3=NCC1C23");
    for (std::uint64_t i = 0; i < 2000; ++i) {
        double v = grid_element(seed, i);
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
        double scaled = v * 1024.0;
        CHECK(scaled == std::floor(scaled));  // multiple of 1/1024
        CHECK(static_cast<double>(static_cast<float>(v)) == v);
    }
}

TEST_CASE("generate_molecule_grid returns raw_grid plus shape, deterministically") {
    Value out = grid_for("CCO", 8);
    REQUIRE(out.contains("raw_grid"));
    REQUIRE(out.contains("shape"));
    CHECK(out["shape"] == Value::array({8, 8, 8}));
    CHECK(out["raw_grid"].size() == 512);
    CHECK(out == grid_for("CCO", 8));
    CHECK(out["raw_grid"] != grid_for("CCN", 8)["raw_grid"]);

    // Every element agrees with the published per-element stream.
    std::uint64_t seed = smiles_seed("CCO");
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(out["raw_grid"][i].get<double>() == grid_element(seed, i));
}

TEST_CASE("generate_molecule_grid validates its argument") {
    GridConfig config{4};
    CHECK_THROWS_AS(generate_molecule_grid(Value::object(), config), Error);
    CHECK_THROWS_AS(
        generate_molecule_grid(Value{{"molecule_description", ""}}, config), Error);
}

TEST_CASE("different molecules share roughly half their signal") {
    // The generator mixes a common stream with a per-molecule stream, so two
    // distinct molecules land near cosine 0.5 instead of 0.
    const int dim = 12;
    Value a = grid_for("CCO", dim)["raw_grid"];
    Value b = grid_for("c1ccccc1", dim)["raw_grid"];
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double x = a[i].get<double>();
        double y = b[i].get<double>();
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    double cosine = dot / std::sqrt(na * nb);
    CHECK(cosine > 0.3);
    CHECK(cosine < 0.7);
}

TEST_CASE("retrieve_similar_molecules formats a ranked top-k list") {
    const int dim = 8;
    GridConfig config{dim};
    SimilarityCorpus corpus = SimilarityCorpus::load(kFixtures + "/corpus.json", 10);
    REQUIRE(corpus.molecules.size() == 100);

    Value query = grid_for(corpus.molecules[17], dim);
    Value result = retrieve_similar_molecules(Value{{"raw_grid", query["raw_grid"]}},
                                              config, corpus);
    REQUIRE(result.is_string());
    std::string text = result.get<std::string>();

    std::istringstream lines(text);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "Top-K similar samples:");
    int rank = 0;
    while (std::getline(lines, line)) {
        ++rank;
        char smiles[128];
        double score;
        int fields = std::sscanf(line.c_str(), (std::to_string(rank) + ". SMILES: %127s | Score: %lf").c_str(),
                                 smiles, &score);
        CHECK(fields == 2);
        CHECK(score <= 1.0 + 1e-9);
    }
    CHECK(rank == 10);

    // A corpus member queried against the corpus is its own best match.
    CHECK(text.find("1. SMILES: " + corpus.molecules[17] + " | Score: 1.0000") !=
          std::string::npos);
}

TEST_CASE("retrieve_similar_molecules matches a brute-force oracle") {
    const int dim = 6;
    GridConfig config{dim};
    SimilarityCorpus corpus = SimilarityCorpus::load(kFixtures + "/corpus.json", 10);

    Value query_grid = grid_for("OC12COC3=NCC1C23", dim)["raw_grid"];
    std::vector<double> query;
    for (const auto& item : query_grid) query.push_back(item.get<double>());
    double query_norm = 0;
    for (double q : query) query_norm += q * q;
    query_norm = std::sqrt(query_norm);

    struct Scored {
        double score;
        std::size_t index;
    };
    std::vector<Scored> oracle;
    for (std::size_t m = 0; m < corpus.molecules.size(); ++m) {
        std::uint64_t seed = smiles_seed(corpus.molecules[m]);
        double dot = 0, norm_sq = 0;
        for (std::size_t i = 0; i < query.size(); ++i) {
            double g = grid_element(seed, i);
            dot += query[i] * g;
            norm_sq += g * g;
        }
        oracle.push_back({dot / (query_norm * std::sqrt(norm_sq)), m});
    }
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });

    Value result =
        retrieve_similar_molecules(Value{{"raw_grid", query_grid}}, config, corpus);
    std::istringstream lines(result.get<std::string>());
    std::string line;
    std::getline(lines, line);  // header
    for (int rank = 0; rank < 10; ++rank) {
        REQUIRE(std::getline(lines, line));
        char expected_line[192];
        std::snprintf(expected_line, sizeof(expected_line), "%d. SMILES: %s | Score: %.4f",
                      rank + 1, corpus.molecules[oracle[rank].index].c_str(),
                      oracle[rank].score);
        CHECK(line == expected_line);
    }
}

TEST_CASE("retrieve_similar_molecules rejects mis-shaped grids") {
    GridConfig config{8};
    SimilarityCorpus corpus;
    corpus.molecules = {"CCO"};

    try {
        retrieve_similar_molecules(Value{{"raw_grid", Value::array({1.0, 2.0})}}, config,
                                   corpus);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::shape_mismatch);
        CHECK(std::string(e.what()).find("512") != std::string::npos);
    }

    Value bad = Value::array();
    for (int i = 0; i < 512; ++i) bad.push_back(i == 7 ? Value("x") : Value(0.5));
    try {
        retrieve_similar_molecules(Value{{"raw_grid", bad}}, config, corpus);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::shape_mismatch);
    }

    CHECK_THROWS_AS(retrieve_similar_molecules(Value::object(), config, corpus), Error);
}

TEST_CASE("corpus loading validates the document") {
    CHECK_THROWS_AS(SimilarityCorpus::load(kFixtures + "/no_such.json"), Error);
    SimilarityCorpus corpus = SimilarityCorpus::load(kFixtures + "/corpus.json", 3);
    CHECK(corpus.top_k == 3);
    std::set<std::string> unique(corpus.molecules.begin(), corpus.molecules.end());
    CHECK(unique.size() == corpus.molecules.size());
    // The replayed query molecule is deliberately absent.
    CHECK_FALSE(unique.contains("OC12COC3=NCC1C23"));
}

TEST_CASE("tika returns document text via alias or directory lookup") {
    DocumentRoot root;
    root.directory = kFixtures + "/sds";
    root.aliases["sds.pdf"] = kFixtures + "/sds/titanium.txt";

    Value aliased = tika(Value{{"pdf_path", "sds.pdf"}}, root);
    REQUIRE(aliased.is_string());
    CHECK(aliased.get<std::string>().size() == 30000);
    CHECK(aliased.get<std::string>() == read_file(kFixtures + "/sds/titanium.txt"));

    Value direct = tika(Value{{"pdf_path", "acetone.txt"}}, root);
    CHECK(direct.get<std::string>() == read_file(kFixtures + "/sds/acetone.txt"));

    try {
        tika(Value{{"pdf_path", "missing.pdf"}}, root);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::file_not_found);
        CHECK(std::string(e.what()).find("missing.pdf") != std::string::npos);
    }
}

TEST_CASE("extract_sds reproduces the expected extraction for every fixture") {
    for (const char* name :
         {"titanium", "acetone", "sodium_chloride", "mixture", "empty_ingredients"}) {
        CAPTURE(name);
        std::string text = read_file(kFixtures + "/sds/" + name + ".txt");
        Value expected = Value::parse(read_file(kFixtures + "/sds/" + name + ".expected.json"));
        CHECK(extract_sds(Value{{"content", text}}) == expected);
    }
}

TEST_CASE("extract_sds rejects documents without the required sections") {
    std::string text = read_file(kFixtures + "/sds/malformed.txt");
    try {
        extract_sds(Value{{"content", text}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::malformed_document);
    }
    CHECK_THROWS_AS(extract_sds(Value{{"content", ""}}), Error);
    CHECK_THROWS_AS(extract_sds(Value::object()), Error);
}

TEST_CASE("extract_sds takes the first product name and only section 3 rows") {
    std::string text =
        "Product name: First\n"
        "Product name: Second\n"
        "SECTION 3: Composition/information on ingredients\n"
        "Component: Water\n"
        "CAS-No: 7732-18-5\n"
        "SECTION 4: First aid\n"
        "Component: Ignored\n";
    Value out = extract_sds(Value{{"content", text}});
    CHECK(out["product_name"] == "First");
    REQUIRE(out["ingredients"].size() == 1);
    CHECK(out["ingredients"][0]["name"] == "Water");
    CHECK(out["ingredients"][0]["cas_rn"] == "7732-18-5");
    CHECK(out["ingredients"][0]["concentration"] == "");
    CHECK(out["ingredients"][0]["formula"] == "");
}

TEST_CASE("toolsets advertise the documented tool names") {
    GridConfig config{4};
    SimilarityCorpus corpus;
    corpus.molecules = {"CCO"};
    auto grid_tools = grid_toolset(config, corpus);
    REQUIRE(grid_tools.size() == 2);
    CHECK(grid_tools[0].descriptor.name == "generate_molecule_grid");
    CHECK(grid_tools[1].descriptor.name == "retrieve_similar_molecules");
    CHECK(grid_tools[0].descriptor.parameters["required"] ==
          Value::array({"molecule_description"}));

    DocumentRoot root;
    auto sds_tools = sds_toolset(root);
    REQUIRE(sds_tools.size() == 2);
    CHECK(sds_tools[0].descriptor.name == "tika");
    CHECK(sds_tools[1].descriptor.name == "extract_sds");

    // The callables and descriptors line up.
    GridConfig small{2};
    auto small_tools = grid_toolset(small, corpus);
    Value out = small_tools[0].fn(Value{{"molecule_description", "CCO"}});
    CHECK(out["raw_grid"].size() == 8);
}
