// Exact extensions F2 <- M_0 <- ... <- M_{s-1} <- Σ^t F2 representing classes
// in Ext^{s,t}(F2, F2), and the library of shipped extensions.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "extsq/module.hpp"
#include "extsq/resolution.hpp"

namespace extsq {

struct ExactExtension {
    std::string name;
    int s = 0;
    int t = 0;
    // Modules are valid (compiled) through this internal degree.
    int cap = 0;
    // M_0 .. M_s; M_s is Σ^t F2 on one generator.
    std::vector<ModulePtr> nodes;
    // maps[i] : M_i -> M_{i-1}; maps[0] is the augmentation onto F2.
    std::vector<ModuleMap> maps;
    // Published chain-map values "s_g" -> element of M_s, if any were shipped.
    std::vector<std::pair<std::string, std::string>> published_chain;

    // i = -1 is F2.
    const ModulePtr& node(int i) const;
    const NamedElement& top() const { return nodes.back()->generators().front(); }
    // Node holding a generator of this name, or -2.  "u" is the F2 generator.
    int node_of(std::string_view generator) const;
    // "∂(k1) = Sq1 k0", one line per generator.
    std::vector<std::string> boundary_lines() const;
};

// Builds the complex from modules M_0..M_{s-1} and the images of every
// generator of M_i in M_{i-1} (images[s] holds the image of the top
// generator).  Throws if a map is not A-linear.
ExactExtension assemble_extension(std::string name, int t, std::vector<ModulePtr> modules,
                                  const std::vector<std::vector<F2Vector>>& images, int cap,
                                  std::string top_name = {});

struct ExactnessReport {
    std::vector<std::string> failures;
    int degrees_checked = 0;
    bool ok() const { return failures.empty(); }
};

// Linearity, d.d = 0 and exactness at F2, at each M_i and at Σ^t F2, in
// every internal degree up to max_degree (default: the extension's cap).
ExactnessReport verify_exact(const ExactExtension& e, std::optional<int> max_degree = {});

// Yoneda splice: b suspended by a.t glued onto the end of a.
ExactExtension splice(const ExactExtension& a, const ExactExtension& b);
// The length-0 extension F2 <- F2.
ExactExtension identity_extension();

// Replaces every Sq^i by Sq^{2i}: each module is doubled and each map keeps
// its matrices, moved to doubled degrees.
ExactExtension double_extension(const ExactExtension& e, std::string name = {});

// Pushout extension F2 <- C_0 <- ... <- C_{s-2} <- P <- Σ^t F2 for the
// cocycle that is 1 on the listed generators of C_s in degree t.  P is the
// pushout of C_{s-1} <- C_s -> Σ^t F2.  Modules are cut off at 2t.
ExactExtension canonical_extension(const FreeResolution& r, int s, int t, const std::vector<int>& cocycle);

// Text format ('#' comments):
//   extension <name>
//   bidegree <s> <t>
//   node <module file> [truncate <lo> <hi>]     one per M_i, in order
//   map <generator> -> <element>               images under the boundary
//   chain <s_g> -> <element>                   published chain-map values
//   double <extension file>                    instead of nodes and maps
// Module paths are relative to the extension file.
ExactExtension load_extension(const std::string& path, std::optional<int> cap = {});

// Names of the shipped extensions: h0..h6, c0, c1, f0, e0, d0.
std::vector<std::string> library_names();
std::string library_path(std::string_view name);
ExactExtension library(std::string_view name);

// Directory with the shipped data; EXTSQ_DATA_DIR overrides the build-time
// default.
std::string data_dir();

}  // namespace extsq
