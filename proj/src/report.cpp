#include "report.hpp"

#include "error.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tfpr::harness
{
    namespace
    {
        std::string num(double v)
        {
            if (std::isnan(v))
                return "nan";
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        // quote only when needed (status messages may contain commas)
        std::string field(const std::string& s)
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"')
                    out += '"';
                out += c;
            }
            return out + "\"";
        }

        nlohmann::json jnum(double v)
        {
            if (std::isfinite(v))
                return v;
            return num(v);
        }
    }  // namespace

    void write_csv(std::ostream& out, const std::vector<CellResult>& rows)
    {
        out << "algorithm,window,lambda_requested,lambda_realized,D,a,M,signal_id,snr_ms_db,projection_error,"
               "wall_time_s,iterations,seed,status\n";
        for (const auto& r : rows)
            out << field(r.algorithm) << ',' << r.window << ',' << num(r.lambda_requested) << ','
                << num(r.lambda_realized) << ',' << r.D << ',' << r.a << ',' << r.M << ',' << field(r.signal_id) << ','
                << num(r.snr_ms_db) << ',' << num(r.projection_error) << ',' << num(r.wall_time_s) << ','
                << r.iterations << ',' << r.seed << ',' << field(r.status) << '\n';
    }

    void write_ranges_csv(std::ostream& out, const std::vector<ParameterRange>& ranges)
    {
        out << "algorithm,D,lambda_lo,lambda_hi,M_lo,M_hi,best_lambda,best_snr_ms_db,below_threshold\n";
        for (const auto& r : ranges)
            out << field(r.algorithm) << ',' << r.D << ',' << num(r.lambda_lo) << ',' << num(r.lambda_hi) << ','
                << r.M_lo << ',' << r.M_hi << ',' << num(r.best_lambda) << ',' << num(r.best_snr_db) << ','
                << (r.below_threshold ? "true" : "false") << '\n';
    }

    nlohmann::json to_json(const CellResult& r)
    {
        return {{"algorithm", r.algorithm},
                {"window", r.window},
                {"lambda_requested", jnum(r.lambda_requested)},
                {"lambda_realized", jnum(r.lambda_realized)},
                {"D", r.D},
                {"a", r.a},
                {"M", r.M},
                {"signal_id", r.signal_id},
                {"snr_ms_db", jnum(r.snr_ms_db)},
                {"projection_error", jnum(r.projection_error)},
                {"wall_time_s", jnum(r.wall_time_s)},
                {"iterations", r.iterations},
                {"seed", r.seed},
                {"status", r.status},
                {"odg", nullptr}};
    }

    nlohmann::json to_json(const std::vector<CellResult>& rows)
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back(to_json(r));
        return arr;
    }

    nlohmann::json to_json(const SweepSpec& spec)
    {
        nlohmann::json j;
        for (const auto& a : spec.algorithms)
            j["algorithms"].push_back(a.name());
        j["lambdas"] = spec.lambdas;
        j["redundancies"] = spec.redundancies;
        for (WindowFamily f : spec.windows)
            j["windows"].push_back(family_name(f));
        for (const auto& e : spec.corpus)
            j["corpus"].push_back({{"id", e.id}, {"length", e.signal.length()}, {"sample_rate", e.signal.sample_rate}});
        j["seed"] = spec.seed;
        j["trim"] = spec.trim;
        j["threads"] = spec.threads;
        j["record_timing"] = spec.record_timing;
        j["pghi_rel_tolerance"] = spec.pghi.rel_tolerance;
        j["fgla_alpha"] = spec.fgla_alpha;
        return j;
    }

    nlohmann::json to_json(const OptimizeResult& res)
    {
        nlohmann::json ranges = nlohmann::json::array();
        for (const auto& r : res.ranges)
            ranges.push_back({{"algorithm", r.algorithm},
                              {"D", r.D},
                              {"lambda_lo", jnum(r.lambda_lo)},
                              {"lambda_hi", jnum(r.lambda_hi)},
                              {"M_lo", r.M_lo},
                              {"M_hi", r.M_hi},
                              {"best_lambda", jnum(r.best_lambda)},
                              {"best_snr_ms_db", jnum(r.best_snr_db)},
                              {"passing_lambdas", r.passing},
                              {"below_threshold", r.below_threshold}});
        return {{"ranges", ranges},
                {"below_threshold", res.below_threshold},
                {"stop_reason", res.stop_reason},
                {"cells", to_json(res.cells)}};
    }

    void write_text(const std::string& path, const std::string& text)
    {
        const std::filesystem::path p(path);
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        require(bool(f), ErrorKind::Io, "cannot write " + path);
        f << text;
        require(bool(f), ErrorKind::Io, "write failed for " + path);
    }
}  // namespace tfpr::harness
