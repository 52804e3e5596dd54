#include "rmatch/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace rmatch {

using nlohmann::json;

std::string density_csv(const StepDensity& f) {
    std::ostringstream os;
    os << "left,right,value,value_decimal\n";
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        os << f.breakpoints[i].str() << "," << f.breakpoints[i + 1].str() << ","
           << f.values[i].str() << "," << f.values[i].decimal(20) << "\n";
    }
    return os.str();
}

std::string surface_csv(const std::vector<SurfaceRow>& rows) {
    std::ostringstream os;
    os << "alpha,p,pi0_exact,pi0_decimal,status,M\n";
    for (const auto& r : rows) {
        os << r.alpha.str() << "," << r.p.str() << ",";
        if (r.pi0) {
            os << r.pi0->str() << "," << Scalar(*r.pi0).decimal(20);
        } else {
            os << ",";
        }
        os << "," << r.status << "," << r.M << "\n";
    }
    return os.str();
}

std::string scan_csv(const ScanResult& scan) {
    std::ostringstream os;
    os << "left,right,m_alpha,M,word,y_formula\n";
    for (const auto& mi : scan.intervals) {
        os << mi.left.str() << "," << mi.right.str() << "," << mi.m_alpha << ","
           << mi.m_alpha + 1 << ",";
        for (int d : mi.branch_word) os << (d < 0 ? "m" : d == 0 ? "0" : "1");
        os << "," << mi.y_formula.str() << "\n";
    }
    for (const auto& [l, r] : scan.gaps)
        os << l.str() << "," << r.str() << ",,,unresolved,\n";
    return os.str();
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << "left,right,mass,density_estimate,stderr\n";
    os.precision(17);
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
        os << h.edges[b] << "," << h.edges[b + 1] << "," << h.mass[b] << "," << h.density[b]
           << "," << h.density_stderr[b] << "\n";
    }
    return os.str();
}

namespace {

struct Canvas {
    std::ostringstream body;
    double w = 720, h = 480, margin = 48;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;

    double X(double x) const { return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin); }
    double Y(double y) const { return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin); }

    std::string finish(const std::string& title) {
        std::ostringstream os;
        os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
           << "' viewBox='0 0 " << w << " " << h << "'>\n";
        os << "<rect width='100%' height='100%' fill='white'/>\n";
        os << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
           << "</text>\n";
        os << "<rect x='" << margin << "' y='" << margin << "' width='" << w - 2 * margin
           << "' height='" << h - 2 * margin << "' fill='none' stroke='#888'/>\n";
        os << body.str();
        os << "</svg>\n";
        return os.str();
    }

    void axis_labels() {
        body << "<text x='" << X(xmin) << "' y='" << h - margin + 16 << "' font-size='11'>"
             << xmin << "</text>\n";
        body << "<text x='" << X(xmax) - 20 << "' y='" << h - margin + 16 << "' font-size='11'>"
             << xmax << "</text>\n";
        body << "<text x='" << margin - 40 << "' y='" << Y(ymax) + 4 << "' font-size='11'>"
             << ymax << "</text>\n";
    }
};

}  // namespace

std::string svg_step_plot(const StepDensity& f, const std::string& title) {
    Canvas cv;
    cv.xmin = f.breakpoints.front().to_double();
    cv.xmax = f.breakpoints.back().to_double();
    cv.ymin = 0;
    cv.ymax = 0.1;
    for (const auto& v : f.values) cv.ymax = std::max(cv.ymax, v.to_double() * 1.15);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double x0 = cv.X(f.breakpoints[i].to_double());
        double x1 = cv.X(f.breakpoints[i + 1].to_double());
        double y = cv.Y(f.values[i].to_double());
        cv.body << "<line x1='" << x0 << "' y1='" << y << "' x2='" << x1 << "' y2='" << y
                << "' stroke='#1f5aa8' stroke-width='2'/>\n";
        cv.body << "<line x1='" << x1 << "' y1='" << cv.Y(0) << "' x2='" << x1 << "' y2='"
                << cv.Y(cv.ymax / 1.15) << "' stroke='#ccc' stroke-width='0.5'/>\n";
    }
    cv.axis_labels();
    return cv.finish(title);
}

std::string svg_histogram_overlay(const Histogram& h, const StepDensity* exact,
                                  const std::string& title) {
    Canvas cv;
    cv.xmin = h.edges.front();
    cv.xmax = h.edges.back();
    cv.ymin = 0;
    cv.ymax = 0.1;
    for (double d : h.density) cv.ymax = std::max(cv.ymax, d * 1.15);
    if (exact)
        for (const auto& v : exact->values) cv.ymax = std::max(cv.ymax, v.to_double() * 1.15);
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
        double x0 = cv.X(h.edges[b]), x1 = cv.X(h.edges[b + 1]);
        double y = cv.Y(h.density[b]);
        cv.body << "<rect x='" << x0 << "' y='" << y << "' width='" << x1 - x0 << "' height='"
                << cv.Y(0) - y << "' fill='#9ec5e8' stroke='none'/>\n";
    }
    if (exact) {
        for (std::size_t i = 0; i < exact->values.size(); ++i) {
            double x0 = cv.X(exact->breakpoints[i].to_double());
            double x1 = cv.X(exact->breakpoints[i + 1].to_double());
            double y = cv.Y(exact->values[i].to_double());
            cv.body << "<line x1='" << x0 << "' y1='" << y << "' x2='" << x1 << "' y2='" << y
                    << "' stroke='#c02020' stroke-width='2'/>\n";
        }
    }
    cv.axis_labels();
    return cv.finish(title);
}

std::string svg_heatmap(const std::vector<SurfaceRow>& rows, const std::string& title) {
    std::vector<double> alphas, ps;
    auto push_unique = [](std::vector<double>& v, double x) {
        for (double e : v)
            if (e == x) return;
        v.push_back(x);
    };
    for (const auto& r : rows) {
        push_unique(alphas, r.alpha.to_double());
        push_unique(ps, r.p.to_double());
    }
    std::sort(alphas.begin(), alphas.end());
    std::sort(ps.begin(), ps.end());
    Canvas cv;
    cv.xmin = alphas.front();
    cv.xmax = alphas.back();
    cv.ymin = ps.front();
    cv.ymax = ps.back();
    double cw = (cv.w - 2 * cv.margin) / std::max<std::size_t>(1, alphas.size());
    double ch = (cv.h - 2 * cv.margin) / std::max<std::size_t>(1, ps.size());
    for (const auto& r : rows) {
        if (!r.pi0) continue;
        double v = Scalar(*r.pi0).to_double();  // in [0, 1/2], ceiling 1/2
        double t = std::min(1.0, v / 0.5);
        int red = static_cast<int>(40 + 215 * t);
        int blue = static_cast<int>(235 - 195 * t);
        double x = cv.X(r.alpha.to_double()) - cw / 2, y = cv.Y(r.p.to_double()) - ch / 2;
        cv.body << "<rect x='" << x << "' y='" << y << "' width='" << cw << "' height='" << ch
                << "' fill='rgb(" << red << ",80," << blue << ")'/>\n";
    }
    cv.body << "<text x='" << cv.w / 2 << "' y='" << cv.h - 8
            << "' text-anchor='middle' font-size='11'>alpha (ceiling 1/2 on [3/2,2])</text>\n";
    cv.axis_labels();
    return cv.finish(title);
}

namespace {

json branch_to_json(const Branch& b) {
    json j;
    j["lo"] = b.lo.str();
    j["hi"] = b.hi.str();
    j["lo_closed"] = b.lo_closed;
    j["hi_closed"] = b.hi_closed;
    if (b.is_affine()) {
        const auto& f = std::get<AffineForm>(b.form);
        j["form"] = "affine";
        j["k"] = f.k.str();
        j["d"] = f.d.str();
    } else {
        const auto& m = std::get<MoebiusForm>(b.form);
        j["form"] = "moebius";
        j["a"] = m.a.str();
        j["b"] = m.b.str();
        j["c"] = m.c.str();
        j["e"] = m.e.str();
    }
    return j;
}

Branch branch_from_json(const json& j) {
    Branch b;
    b.lo = Scalar::parse(j.at("lo").get<std::string>());
    b.hi = Scalar::parse(j.at("hi").get<std::string>());
    b.lo_closed = j.at("lo_closed").get<bool>();
    b.hi_closed = j.at("hi_closed").get<bool>();
    std::string form = j.at("form").get<std::string>();
    if (form == "affine") {
        b.form = AffineForm{Scalar::parse(j.at("k").get<std::string>()),
                            Scalar::parse(j.at("d").get<std::string>())};
    } else if (form == "moebius") {
        b.form = MoebiusForm{
            Scalar::parse(j.at("a").get<std::string>()), Scalar::parse(j.at("b").get<std::string>()),
            Scalar::parse(j.at("c").get<std::string>()), Scalar::parse(j.at("e").get<std::string>())};
    } else {
        throw parse_error("unknown branch form: " + form);
    }
    return b;
}

json map_to_json_obj(const PiecewiseMap& m) {
    json j;
    j["ambient"] = {m.lo().str(), m.hi().str()};
    j["branches"] = json::array();
    for (const auto& b : m.branches()) j["branches"].push_back(branch_to_json(b));
    return j;
}

PiecewiseMap map_from_json_obj(const json& j) {
    Scalar lo = Scalar::parse(j.at("ambient").at(0).get<std::string>());
    Scalar hi = Scalar::parse(j.at("ambient").at(1).get<std::string>());
    std::vector<Branch> branches;
    for (const auto& bj : j.at("branches")) branches.push_back(branch_from_json(bj));
    return PiecewiseMap(std::move(lo), std::move(hi), std::move(branches));
}

}  // namespace

std::string map_to_json(const PiecewiseMap& map) { return map_to_json_obj(map).dump(2); }

std::string system_to_json(const RandomSystem& sys) {
    json j;
    j["maps"] = json::array();
    for (std::size_t i = 0; i < sys.n_maps(); ++i) {
        const auto* pm = dynamic_cast<const PiecewiseMap*>(&sys.map(i));
        if (!pm) throw std::invalid_argument("only finite-branch systems serialize to JSON");
        j["maps"].push_back(map_to_json_obj(*pm));
    }
    j["probs"] = json::array();
    for (std::size_t i = 0; i < sys.n_maps(); ++i) j["probs"].push_back(sys.prob(i).str());
    return j.dump(2);
}

PiecewiseMap map_from_json(const std::string& text) {
    return map_from_json_obj(json::parse(text));
}

RandomSystem system_from_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<MapPtr> maps;
    for (const auto& mj : j.at("maps"))
        maps.push_back(std::make_shared<PiecewiseMap>(map_from_json_obj(mj)));
    std::vector<Rational> probs;
    for (const auto& pj : j.at("probs")) probs.push_back(Rational::parse(pj.get<std::string>()));
    return RandomSystem(std::move(maps), std::move(probs));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

}  // namespace rmatch
