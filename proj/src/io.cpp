#include "vpfocus/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vpfocus {

std::string format_number(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

Json params_to_json(const ParameterSet& p)
{
    Json j;
    j["kind"] = std::string(to_string(p.kind));
    j["C1"] = p.targets.C1;
    j["C2"] = p.targets.C2;
    j["a"] = p.targets.a;
    j["b"] = p.targets.b;
    j["c"] = p.targets.c;
    j["safety_factor"] = p.safety_factor;
    j["k"] = p.k;
    j["eps"] = p.eps;
    j["a0"] = p.a0;
    j["T"] = p.T;
    j["d"] = p.d;
    j["delta"] = p.delta;
    j["N"] = p.N;
    j["h"] = p.h;
    j["l_max"] = p.l_max;
    j["bump_mass"] = p.bump_mass();
    j["mass_lower_bound"] = p.mass_lower_bound();
    j["mass_upper_bound"] = p.mass_upper_bound();
    j["fixed_point_iterations"] = p.fixed_point_iterations;
    Json terms = Json::object();
    for (const auto& t : p.a0_terms)
        terms[t.name] = t.value;
    j["a0_terms"] = terms;
    Json times = Json::object();
    for (const auto& t : p.T_terms)
        times[t.name] = t.value;
    j["T_terms"] = times;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

constexpr const char* state_header = "t,shell_id,r,w,l,mu,m_enclosed\n";

void append_rows(std::string& out, double t, const Eigen::ArrayXd& r, const Eigen::ArrayXd& w,
                 const Eigen::ArrayXd& l, const Eigen::ArrayXd& mu, const Eigen::ArrayXd& m)
{
    const std::string ts = format_number(t);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        out += ts;
        out += ',';
        out += std::to_string(i);
        for (double v : {r[i], w[i], l[i], mu[i], m[i]}) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
}

} // namespace

std::string ensemble_csv(const Ensemble& ens)
{
    std::string out = state_header;
    append_rows(out, ens.t, ens.r, ens.w, ens.l, ens.mu, enclosed_mass(ens));
    return out;
}

std::string snapshots_csv(const Ensemble& ens, const std::vector<Snapshot>& snapshots)
{
    std::string out = state_header;
    for (const auto& s : snapshots)
        append_rows(out, s.t, s.r, s.w, ens.l, ens.mu, s.m_enclosed);
    return out;
}

std::string density_profile_csv(const Observables& obs)
{
    std::string out = "r_mid,rho\n";
    const Eigen::ArrayXd mid = obs.bin_mid();
    for (Eigen::Index i = 0; i < mid.size(); ++i)
        out += format_number(mid[i]) + ',' + format_number(obs.rho[i]) + '\n';
    return out;
}

std::string field_profile_csv(const Observables& obs)
{
    std::string out = "r,E\n";
    for (const auto& s : obs.field)
        out += format_number(s.r) + ',' + format_number(s.E) + '\n';
    return out;
}

} // namespace vpfocus
