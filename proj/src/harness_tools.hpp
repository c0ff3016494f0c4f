#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mirror.hpp"
#include "value.hpp"

namespace toolmem::harness {

/// Deterministic per-element stream underlying the synthetic grids. The same
/// SMILES always yields a bit-identical grid; every element is a dyadic
/// rational exactly representable as a 32-bit float, so its JSON rendering is
/// short and stable.
std::uint64_t smiles_seed(const std::string& smiles);
double grid_element(std::uint64_t seed, std::uint64_t index);

struct GridConfig {
    int dim = 128;  // grid is dim x dim x dim

    std::uint64_t element_count() const {
        return static_cast<std::uint64_t>(dim) * dim * dim;
    }
};

/// `generate_molecule_grid`: SMILES in, {raw_grid, shape} out.
Value generate_molecule_grid(const Value& args, const GridConfig& config);

struct SimilarityCorpus {
    std::vector<std::string> molecules;
    int top_k = 10;

    static SimilarityCorpus load(const std::string& path, int top_k = 10);
};

/// Cosine scores of the query grid against every corpus grid, descending,
/// ties broken by corpus order. Each entry: `{rank}. SMILES: {s} | Score:
/// {score:.4f}` under a `Top-K similar samples:` header.
Value retrieve_similar_molecules(const Value& args, const GridConfig& config,
                                 const SimilarityCorpus& corpus);

struct DocumentRoot {
    std::string directory;
    /// Requested name -> actual file, checked before the directory.
    std::map<std::string, std::string> aliases;
};

/// `tika`: returns the textual content of the named document. Harness
/// fixtures are plain text styled as SDS sheets.
Value tika(const Value& args, const DocumentRoot& root);

/// `extract_sds`: product name and ingredient table from SDS text.
Value extract_sds(const Value& args);

/// Tool bundles as advertised to the proxy. `grid_toolset` serves the
/// molecule workflow, `sds_toolset` the data-sheet workflow.
std::vector<CallableTool> grid_toolset(const GridConfig& config,
                                       const SimilarityCorpus& corpus);
std::vector<CallableTool> sds_toolset(const DocumentRoot& root);

}  // namespace toolmem::harness
