#include "extsq/walkthrough.hpp"

#include <fmt/format.h>

#include "extsq/chainmap.hpp"
#include "extsq/extension.hpp"

namespace extsq {

bool WalkthroughReport::ok() const { return first_divergence() == nullptr; }

const WalkthroughStep* WalkthroughReport::first_divergence() const
{
    for (const auto& s : steps)
        if (!s.ok())
            return &s;
    return nullptr;
}

namespace {

ModulePtr load_module(const std::string& file)
{
    return compile(load_presentation(data_dir() + "/modules/" + file), 64);
}

std::string degrees_of(const Module& m)
{
    std::string out = "{";
    for (int n = m.lo(); n <= m.hi(); ++n) {
        for (std::size_t i = 0; i < m.dim(n); ++i) {
            if (out.size() > 1)
                out += ",";
            out += std::to_string(n);
        }
    }
    return out + "}";
}

std::string ext_group(const FreeResolution& r, int s, int t)
{
    std::string out = "<";
    for (int g : r.generators_in(s, t)) {
        if (out.size() > 1)
            out += ", ";
        out += fmt::format("{}_{}", s, g);
    }
    return out + ">";
}

std::shared_ptr<FreeResolution> resolve(ModulePtr m, int s, int t)
{
    auto r = std::make_shared<FreeResolution>(std::move(m));
    r->extend(s, t);
    return r;
}

// The map sending the single generator of `source` to v in degree n of target.
ModuleMap cyclic_map(ModulePtr source, ModulePtr target, const F2Vector& v)
{
    return ModuleMap::from_generators(std::move(source), std::move(target), {v});
}

F2Vector preimage(const ModuleMap& inc, int n, const F2Vector& v)
{
    auto x = solve(inc.matrix(n), v);
    if (!x)
        throw std::logic_error(fmt::format("walkthrough: element of degree {} is not in the submodule", n));
    return *x;
}

}  // namespace

WalkthroughReport e0_walkthrough(const FreeResolution& r, SqOptions opts)
{
    WalkthroughReport rep;
    auto step = [&](std::string name, std::string expected, std::string got) {
        rep.steps.push_back({std::move(name), std::move(expected), std::move(got)});
    };
    const int t = 21;
    const CochainClass e0{4, t, {5}};

    // F2 <- M0.
    const ModulePtr f2 = ground_field();
    const ModulePtr m0 = load_module("e0_m0.mod");
    const ModuleMap eps = cyclic_map(m0, f2, F2Vector::unit(1, 0));
    const auto r_m0 = resolve(m0, 4, t);
    step("dim M0", "5", std::to_string(m0->total_dimension()));
    step("Ext^{4,21}(M0)", "<>", ext_group(*r_m0, 4, t));
    step("e0 pulled back to M0", "0", pullback_on_ext(eps, *r_m0, r, e0).to_string());

    // M1' = ker(M0 -> F2).
    const SubmoduleResult m1p = kernel(eps, "M1'");
    const auto r_m1p = resolve(m1p.module, 4, t + 1);
    step("degrees of M1'", "{1,3,7,15}", degrees_of(*m1p.module));
    step("Ext^{3,21}(M1')", "<3_9, 3_10>", ext_group(*r_m1p, 3, t));
    step("boundary of 3_9 in Ext(F2)", "4_5",
         les_boundary(m1p.inclusion, eps, *r_m1p, r, {3, t, {9}}).to_string());
    step("boundary of 3_10 in Ext(F2)", "0",
         les_boundary(m1p.inclusion, eps, *r_m1p, r, {3, t, {10}}).to_string());

    // M1 -> M1', and M2' = its kernel.
    const ModulePtr m1 = load_module("e0_m1.mod");
    const ModuleMap p1 = cyclic_map(m1, m1p.module, F2Vector::unit(1, 0));
    const auto r_m1 = resolve(m1, 3, t);
    step("dim M1", "10", std::to_string(m1->total_dimension()));
    step("3_9 pulled back to M1", "0", pullback_on_ext(p1, *r_m1, *r_m1p, {3, t, {9}}).to_string());
    const SubmoduleResult m2p = kernel(p1, "M2'");
    const auto r_m2p = resolve(m2p.module, 3, t);
    step("dim M2'", "6", std::to_string(m2p.module->total_dimension()));
    step("boundary of 2_8 in Ext(M1')", "3_9",
         les_boundary(m2p.inclusion, p1, *r_m2p, *r_m1p, {2, t, {8}}).to_string());

    // M2 -> M2', and M3' = its kernel.
    const ModulePtr m2 = load_module("e0_m2.mod");
    const F2Vector sq4k1 = m1->act(MilnorMonomial({4}), 1, F2Vector::unit(m1->dim(1), 0));
    const ModuleMap p2 = cyclic_map(m2, m2p.module, preimage(m2p.inclusion, 5, sq4k1));
    const auto r_m2 = resolve(m2, 2, t);
    step("dim M2", "10", std::to_string(m2->total_dimension()));
    step("Ext^{2,21}(M2)", "<>", ext_group(*r_m2, 2, t));
    const SubmoduleResult m3p = kernel(p2, "M3'");
    const auto r_m3p = resolve(m3p.module, 1, t);
    step("dim M3'", "4", std::to_string(m3p.module->total_dimension()));
    step("Ext^{1,21}(M3')", "<1_3>", ext_group(*r_m3p, 1, t));
    step("boundary of 1_3 in Ext(M2')", "2_8",
         les_boundary(m3p.inclusion, p2, *r_m3p, *r_m2p, {1, t, {3}}).to_string());

    // The top module.
    const ModulePtr m3 = load_module("e0_m3.mod");
    const auto r_m3 = resolve(m3, 1, t);
    step("Ext^{1,21}(M3)", "<>", ext_group(*r_m3, 1, t));

    // The assembled extension.
    const ExactExtension e = library("e0");
    step("e0 extension exact", "yes", verify_exact(e).ok() ? "yes" : "no");
    step("e0 top cocycle", "4_5", lift_to_extension(r, e).top.to_string());
    step("Sq^*(e0)", "(8_13, 7_12, 6_14, 5_17, 4_16)", compute_sq(r, e, opts).to_string());

    // The d0 variant: a smaller top module in degree 18.
    const ModulePtr m3d = load_module("d0_m3.mod");
    const auto r_m3d = resolve(m3d, 1, 18);
    step("Ext^{1,18}(M3~)", "<>", ext_group(*r_m3d, 1, 18));
    const ExactExtension d = library("d0");
    step("d0 extension exact", "yes", verify_exact(d).ok() ? "yes" : "no");
    step("d0 top cocycle", "4_3", lift_to_extension(r, d).top.to_string());
    return rep;
}

}  // namespace extsq
