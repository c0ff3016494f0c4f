#include "harness_tools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace toolmem::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Shared component across all grids; gives corpus molecules plausibly
// correlated scores instead of near-zero cosines.
constexpr std::uint64_t kCommonStreamSalt = 0x746f6f6c6d656d00ull;

int stream_draw(std::uint64_t seed, std::uint64_t index) {
    // Uniform in [-512, 512].
    std::uint64_t word = splitmix64(seed + index * 0x9e3779b97f4a7c15ull);
    return static_cast<int>(word % 1025u) - 512;
}

const std::string& require_string_arg(const Value& args, const char* name) {
    if (!args.is_object() || !args.contains(name) || !args.at(name).is_string())
        throw Error(ErrorCode::validation,
                    std::string("missing or non-string argument '") + name + "'");
    return args.at(name).get_ref<const std::string&>();
}

}  // namespace

std::uint64_t smiles_seed(const std::string& smiles) {
    // FNV-1a.
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : smiles) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

double grid_element(std::uint64_t seed, std::uint64_t index) {
    int common = stream_draw(kCommonStreamSalt, index);
    int unique = stream_draw(seed, index);
    // Sum of two [-512, 512] draws over 1024: dyadic in [-1, 1], exact in
    // float32 and in shortest round-trip decimal.
    return static_cast<double>(common + unique) / 1024.0;
}

Value generate_molecule_grid(const Value& args, const GridConfig& config) {
    const std::string& smiles = require_string_arg(args, "molecule_description");
    if (smiles.empty())
        throw Error(ErrorCode::validation, "molecule_description must be nonempty");

    std::uint64_t seed = smiles_seed(smiles);
    std::uint64_t count = config.element_count();
    Value grid = Value::array();
    auto& elements = grid.get_ref<Value::array_t&>();
    elements.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
        elements.emplace_back(grid_element(seed, i));

    Value out = Value::object();
    out["raw_grid"] = std::move(grid);
    out["shape"] = Value::array({config.dim, config.dim, config.dim});
    return out;
}

SimilarityCorpus SimilarityCorpus::load(const std::string& path, int top_k) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::file_not_found, "cannot open corpus file '" + path + "'");
    Value doc;
    try {
        doc = Value::parse(in);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::parse, "corpus file '" + path + "': " + e.what());
    }
    if (!doc.is_object() || !doc.contains("molecules") || !doc["molecules"].is_array())
        throw Error(ErrorCode::validation,
                    "corpus file '" + path + "' must contain a 'molecules' array");
    SimilarityCorpus corpus;
    corpus.top_k = top_k;
    for (const auto& item : doc["molecules"]) {
        if (!item.is_string())
            throw Error(ErrorCode::validation, "corpus molecules must be strings");
        corpus.molecules.push_back(item.get<std::string>());
    }
    return corpus;
}

Value retrieve_similar_molecules(const Value& args, const GridConfig& config,
                                 const SimilarityCorpus& corpus) {
    if (!args.is_object() || !args.contains("raw_grid") || !args.at("raw_grid").is_array())
        throw Error(ErrorCode::validation, "missing or non-array argument 'raw_grid'");
    const auto& grid_json = args.at("raw_grid");

    std::uint64_t expected = config.element_count();
    if (grid_json.size() != expected)
        throw Error(ErrorCode::shape_mismatch,
                    "raw_grid has " + std::to_string(grid_json.size()) +
                        " elements, expected " + std::to_string(expected));

    std::vector<double> query;
    query.reserve(grid_json.size());
    for (const auto& item : grid_json) {
        if (!item.is_number())
            throw Error(ErrorCode::shape_mismatch, "raw_grid must contain only numbers");
        query.push_back(item.get<double>());
    }
    double query_norm = std::sqrt(
        std::inner_product(query.begin(), query.end(), query.begin(), 0.0));

    struct Scored {
        double score;
        std::size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(corpus.molecules.size());
    for (std::size_t m = 0; m < corpus.molecules.size(); ++m) {
        std::uint64_t seed = smiles_seed(corpus.molecules[m]);
        double dot = 0.0;
        double norm_sq = 0.0;
        for (std::uint64_t i = 0; i < expected; ++i) {
            double g = grid_element(seed, i);
            dot += query[i] * g;
            norm_sq += g * g;
        }
        double denom = query_norm * std::sqrt(norm_sq);
        scored.push_back({denom == 0.0 ? 0.0 : dot / denom, m});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });

    std::size_t k = std::min<std::size_t>(corpus.top_k, scored.size());
    std::string out = "Top-K similar samples:";
    char line[192];
    for (std::size_t rank = 0; rank < k; ++rank) {
        std::snprintf(line, sizeof(line), "\n%zu. SMILES: %s | Score: %.4f", rank + 1,
                      corpus.molecules[scored[rank].index].c_str(), scored[rank].score);
        out += line;
    }
    return Value(out);
}

Value tika(const Value& args, const DocumentRoot& root) {
    const std::string& requested = require_string_arg(args, "pdf_path");

    std::string actual = requested;
    if (auto it = root.aliases.find(requested); it != root.aliases.end())
        actual = it->second;
    else if (!root.directory.empty() && requested.find('/') == std::string::npos)
        actual = root.directory + "/" + requested;

    std::ifstream in(actual, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::file_not_found, "no document at '" + requested + "'");
    std::ostringstream content;
    content << in.rdbuf();
    return Value(content.str());
}

Value extract_sds(const Value& args) {
    const std::string& content = require_string_arg(args, "content");
    if (content.empty())
        throw Error(ErrorCode::validation, "content must be nonempty");

    auto trimmed = [](std::string text) {
        std::size_t b = text.find_first_not_of(" \t\r");
        std::size_t e = text.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : text.substr(b, e - b + 1);
    };
    auto value_after = [&](const std::string& line, const std::string& label) {
        return trimmed(line.substr(label.size()));
    };

    std::string product_name;
    bool seen_product = false;
    bool in_composition = false;
    bool seen_composition = false;
    Value ingredients = Value::array();
    Value current;

    auto flush = [&]() {
        if (!current.is_null()) ingredients.push_back(std::move(current));
        current = Value();
    };

    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
        std::string text = trimmed(line);
        if (text.starts_with("Product name:") && !seen_product) {
            product_name = value_after(text, "Product name:");
            seen_product = true;
        } else if (text.starts_with("SECTION ")) {
            if (in_composition) flush();
            in_composition = text.starts_with("SECTION 3");
            if (in_composition) seen_composition = true;
        } else if (in_composition) {
            if (text.starts_with("Component:")) {
                flush();
                current = Value::object();
                current["name"] = value_after(text, "Component:");
                current["cas_rn"] = "";
                current["concentration"] = "";
                current["formula"] = "";
            } else if (!current.is_null() && text.starts_with("CAS-No:")) {
                current["cas_rn"] = value_after(text, "CAS-No:");
            } else if (!current.is_null() && text.starts_with("Concentration:")) {
                current["concentration"] = value_after(text, "Concentration:");
            } else if (!current.is_null() && text.starts_with("Formula:")) {
                current["formula"] = value_after(text, "Formula:");
            }
        }
    }
    if (in_composition) flush();

    if (!seen_product || !seen_composition)
        throw Error(ErrorCode::malformed_document,
                    "document lacks a product name or composition section");

    Value out = Value::object();
    out["product_name"] = product_name;
    out["ingredients"] = std::move(ingredients);
    return out;
}

std::vector<CallableTool> grid_toolset(const GridConfig& config,
                                       const SimilarityCorpus& corpus) {
    ToolDescriptor grid_desc;
    grid_desc.name = "generate_molecule_grid";
    grid_desc.description =
        "Generates the electronic grid structure of a molecule from its SMILES "
        "string. Returns the raw grid as a flat float array together with its "
        "shape.";
    grid_desc.parameters = {
        {"type", "object"},
        {"properties",
         {{"molecule_description",
           {{"type", "string"}, {"description", "SMILES string of the molecule"}}}}},
        {"required", Value::array({"molecule_description"})}};

    ToolDescriptor similar_desc;
    similar_desc.name = "retrieve_similar_molecules";
    similar_desc.description =
        "Retrieves the molecules whose electronic grids are most similar to the "
        "given grid, with similarity scores and SMILES strings.";
    similar_desc.parameters = {
        {"type", "object"},
        {"properties",
         {{"raw_grid",
           {{"type", "array"},
            {"items", {{"type", "number"}}},
            {"description", "electronic grid as a flat float array"}}}}},
        {"required", Value::array({"raw_grid"})}};

    return {
        {grid_desc, [config](const Value& a) { return generate_molecule_grid(a, config); }},
        {similar_desc,
         [config, corpus](const Value& a) {
             return retrieve_similar_molecules(a, config, corpus);
         }},
    };
}

std::vector<CallableTool> sds_toolset(const DocumentRoot& root) {
    ToolDescriptor tika_desc;
    tika_desc.name = "tika";
    tika_desc.description =
        "Extracts the textual content of the document at the given path and "
        "returns it as a string.";
    tika_desc.parameters = {
        {"type", "object"},
        {"properties",
         {{"pdf_path", {{"type", "string"}, {"description", "path to the document"}}}}},
        {"required", Value::array({"pdf_path"})}};

    ToolDescriptor extract_desc;
    extract_desc.name = "extract_sds";
    extract_desc.description =
        "Identifies the product name and the ingredient table (name, CAS number, "
        "concentration, formula) in safety-data-sheet text.";
    extract_desc.parameters = {
        {"type", "object"},
        {"properties",
         {{"content", {{"type", "string"}, {"description", "SDS text content"}}}}},
        {"required", Value::array({"content"})}};

    return {
        {tika_desc, [root](const Value& a) { return tika(a, root); }},
        {extract_desc, [](const Value& a) { return extract_sds(a); }},
    };
}

}  // namespace toolmem::harness
