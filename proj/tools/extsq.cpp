// Command-line front end: resolve, verify, lift, splice, sq, verify-tables,
// chart, walkthrough-e0.  Exit status 0 on success, 1 when a verification
// fails, 2 on usage or input errors.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "extsq/chainmap.hpp"
#include "extsq/extension.hpp"
#include "extsq/resolution.hpp"
#include "extsq/sq.hpp"
#include "extsq/syntax.hpp"
#include "extsq/walkthrough.hpp"

using namespace extsq;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ModulePtr module_arg(const std::string& spec, int cap)
{
    if (spec == "F2")
        return ground_field();
    return compile(load_presentation(spec), cap);
}

// A library name or a path to an extension file.
ExactExtension extension_arg(const std::string& spec)
{
    const auto names = library_names();
    if (std::find(names.begin(), names.end(), spec) != names.end())
        return library(spec);
    if (!fs::exists(spec))
        throw UsageError(fmt::format("'{}' is neither a library extension nor a file", spec));
    return load_extension(spec);
}

std::shared_ptr<const FreeResolution> resolve_module(const std::string& spec, int s_max, int t_max, int threads)
{
    ResolverOptions opts;
    opts.threads = threads;
    if (spec == "F2")
        return resolve_ground_field(s_max, t_max, opts);
    auto r = std::make_shared<FreeResolution>(module_arg(spec, t_max), opts);
    r->extend(s_max, t_max);
    return r;
}

void print_counts(const FreeResolution& r, std::ostream& out)
{
    out << "s\tt\tgenerators\n";
    for (const auto& [st, n] : r.ext_dimensions())
        out << fmt::format("{}\t{}\t{}\n", st.first, st.second, n);
}

bool require_exact(const ExactExtension& e)
{
    const ExactnessReport rep = verify_exact(e);
    if (rep.ok())
        return true;
    fmt::print(stderr, "extension {} is not exact:\n", e.name);
    for (const auto& f : rep.failures)
        fmt::print(stderr, "  {}\n", f);
    return false;
}

// Dots per generator at x = t - s, y = s.
std::string chart_svg(const FreeResolution& r, int s_max, int t_max, const std::string& title)
{
    constexpr int cell = 18, margin = 30;
    int x_max = 0;
    for (const auto& [st, n] : r.ext_dimensions())
        if (st.first <= s_max && st.second <= t_max)
            x_max = std::max(x_max, st.second - st.first);
    const int width = 2 * margin + (x_max + 1) * cell, height = 2 * margin + (s_max + 1) * cell;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", width,
        height, width, height);
    out += fmt::format("<title>{}</title>\n", title);
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
    auto px = [&](int x) { return margin + x * cell + cell / 2; };
    auto py = [&](int s) { return height - margin - s * cell - cell / 2; };
    for (int x = 0; x <= x_max; x += 2)
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n", px(x),
                           height - margin / 3, x);
    for (int s = 0; s <= s_max; ++s)
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n", margin / 2,
                           py(s) + 3, s);
    for (const auto& [st, n] : r.ext_dimensions()) {
        const auto [s, t] = st;
        if (s > s_max || t > t_max)
            continue;
        for (int k = 0; k < n; ++k) {
            const int dx = (k - (n - 1) / 2) * 4 - ((n - 1) % 2) * 2;
            out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\"><title>{}</title></circle>\n", px(t - s) + dx,
                               py(s), fmt::format("({}, {}) {} of {}", s, t, k + 1, n));
        }
    }
    return out + "</svg>\n";
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw UsageError("cannot write " + path);
    f << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Minimal resolutions, extensions and Steenrod operations on Ext over the Steenrod algebra"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads (output does not depend on it)")->check(CLI::PositiveNumber);

    // resolve
    auto* resolve = app.add_subcommand("resolve", "Resolve F2 or a module file; print generator counts");
    std::string res_module = "F2", res_out;
    int res_smax = 8, res_tmax = 44;
    resolve->add_option("module", res_module, "F2 or a module file")->required();
    resolve->add_option("--smax", res_smax)->check(CLI::NonNegativeNumber);
    resolve->add_option("--tmax", res_tmax)->check(CLI::NonNegativeNumber);
    resolve->add_option("--out", res_out, "Checkpoint path; the text dump goes to <out>.txt");

    // verify
    auto* verify = app.add_subcommand("verify", "Check exactness and the stored chain map of an extension");
    std::string ver_ext;
    verify->add_option("extension", ver_ext, "Library name or extension file")->required();

    // lift
    auto* lift = app.add_subcommand("lift", "Lift the identity of F2 to an extension; print its top cocycle");
    std::string lift_ext;
    std::uint64_t lift_seed = 0;
    lift->add_option("extension", lift_ext)->required();
    lift->add_option("--seed", lift_seed, "Nonzero: random choices in the lift");

    // splice
    auto* splice_cmd = app.add_subcommand("splice", "Splice two extensions; print exactness and top cocycle");
    std::string sp_a, sp_b;
    splice_cmd->add_option("first", sp_a)->required();
    splice_cmd->add_option("second", sp_b)->required();

    // sq
    auto* sq = app.add_subcommand("sq", "Compute (Sq^s, ..., Sq^0) of the class an extension represents");
    std::string sq_ext;
    std::uint64_t sq_seed = 0;
    sq->add_option("extension", sq_ext)->required();
    sq->add_option("--seed", sq_seed, "Nonzero: random choices in the lift");

    // verify-tables
    auto* tables = app.add_subcommand("verify-tables", "Check the shipped tables of Δ_i values");
    std::string table_dir = data_dir() + "/tables";
    tables->add_option("dir", table_dir, "Directory of <extension>.tsv files");

    // chart
    auto* chart = app.add_subcommand("chart", "Ext chart of F2 or a module as SVG or TSV");
    std::string ch_module = "F2", ch_format = "svg", ch_out;
    int ch_smax = 8, ch_tmax = 44;
    chart->add_option("module", ch_module)->required();
    chart->add_option("--smax", ch_smax)->check(CLI::NonNegativeNumber);
    chart->add_option("--tmax", ch_tmax)->check(CLI::NonNegativeNumber);
    chart->add_option("--format", ch_format)->check(CLI::IsMember({"svg", "tsv"}));
    chart->add_option("--out", ch_out, "Output file (default: stdout)");

    // walkthrough-e0
    auto* walk = app.add_subcommand("walkthrough-e0", "Rebuild the e0 and d0 extensions step by step");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (*resolve) {
            auto r = resolve_module(res_module, res_smax, res_tmax, threads);
            if (!res_out.empty()) {
                r->save(res_out);
                write_file(res_out + ".txt", r->canonical_dump());
            }
            print_counts(*r, std::cout);
            return kPass;
        }
        if (*verify) {
            const ExactExtension e = extension_arg(ver_ext);
            bool ok = require_exact(e);
            if (ok)
                fmt::print("{}: exact through degree {}\n", e.name, e.cap);
            if (!e.published_chain.empty()) {
                auto r = resolve_ground_field(e.s, std::max(e.cap, e.t), {threads});
                const ChainMapReport rep = verify_chain_map(*r, e, e.published_chain);
                fmt::print("{}: chain map {} ({} squares)\n", e.name, rep.ok() ? "commutes" : "FAILS",
                           rep.squares_checked);
                for (const auto& f : rep.failures)
                    fmt::print("  {}\n", f);
                ok = ok && rep.ok();
            }
            return ok ? kPass : kFail;
        }
        if (*lift) {
            const ExactExtension e = extension_arg(lift_ext);
            if (!require_exact(e))
                return kFail;
            auto r = resolve_ground_field(e.s, e.t, {threads});
            fmt::print("{}\n", lift_to_extension(*r, e, lift_seed).top.to_string());
            return kPass;
        }
        if (*splice_cmd) {
            const ExactExtension e = splice(extension_arg(sp_a), extension_arg(sp_b));
            if (!require_exact(e))
                return kFail;
            auto r = resolve_ground_field(e.s, e.t, {threads});
            fmt::print("{}: exact, bidegree ({}, {}), top cocycle {}\n", e.name, e.s, e.t,
                       lift_to_extension(*r, e).top.to_string());
            return kPass;
        }
        if (*sq) {
            const ExactExtension e = extension_arg(sq_ext);
            if (!require_exact(e))
                return kFail;
            auto r = resolve_ground_field(2 * e.s, 2 * e.t, {threads});
            fmt::print("{}\n", compute_sq(*r, e, {threads, sq_seed}).to_string());
            return kPass;
        }
        if (*tables) {
            if (!fs::is_directory(table_dir))
                throw UsageError("no such directory: " + table_dir);
            std::vector<fs::path> files;
            for (const auto& ent : fs::directory_iterator(table_dir))
                if (ent.path().extension() == ".tsv")
                    files.push_back(ent.path());
            std::sort(files.begin(), files.end());
            bool ok = true;
            for (const auto& f : files) {
                const ExactExtension e = extension_arg(f.stem().string());
                auto r = resolve_ground_field(2 * e.s, 2 * e.t, {threads});
                const TableReport rep = verify_table(*r, e, load_delta_table(f.string()));
                fmt::print("{}: {} ({} generators checked, {} beyond the table's range)\n", f.filename().string(),
                           rep.ok() ? "pass" : "FAIL", rep.generators_checked, rep.generators_skipped);
                for (const auto& line : rep.failures)
                    fmt::print("  {}\n", line);
                ok = ok && rep.ok();
            }
            return ok ? kPass : kFail;
        }
        if (*chart) {
            if (ch_tmax > 200)
                throw UsageError("chart: --tmax above 200 is out of range");
            auto r = resolve_module(ch_module, ch_smax, ch_tmax, threads);
            std::string text;
            if (ch_format == "tsv") {
                std::ostringstream ss;
                print_counts(*r, ss);
                text = ss.str();
            }
            else {
                text = chart_svg(*r, ch_smax, ch_tmax, fmt::format("Ext({}, F2)", r->module()->name()));
            }
            if (ch_out.empty())
                std::cout << text;
            else
                write_file(ch_out, text);
            return kPass;
        }
        if (*walk) {
            auto r = resolve_ground_field(8, 42, {threads});
            const WalkthroughReport rep = e0_walkthrough(*r, {threads, 0});
            for (const auto& s : rep.steps) {
                fmt::print("{:<4} {}: {}\n", s.ok() ? "ok" : "FAIL", s.name, s.got);
                if (!s.ok()) {
                    fmt::print("     expected {}\n", s.expected);
                    return kFail;
                }
            }
            return kPass;
        }
    }
    catch (const UsageError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kUsage;
    }
    catch (const ParseError& e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return kUsage;
    }
    catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kUsage;
    }
    return kUsage;
}
