#include "hamflow/reference.hpp"

#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "hamflow/bump.hpp"
#include "hamflow/errors.hpp"
#include "hamflow/perturb.hpp"

namespace hamflow {

namespace {

bool match_call(const std::string& id, const std::string& name,
                std::string& args) {
    if (id.rfind(name + "(", 0) != 0 || id.back() != ')') return false;
    args = id.substr(name.size() + 1, id.size() - name.size() - 2);
    return true;
}

std::vector<double> parse_reals(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// exact flow of the affine field y' = J S y + b via the augmented exponential
std::pair<Phase4, Mat4> affine_flow(const Mat4& S, const Vec4& b,
                                    const Phase4& y0, double t) {
    Mat4 A = symplectic_J() * S;
    Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
    M.block<4, 4>(0, 0) = t * A;
    M.block<4, 1>(0, 4) = t * b;
    Eigen::Matrix<double, 5, 5> E = M.exp();
    Mat4 F = E.block<4, 4>(0, 0);
    Phase4 y = F * y0 + E.block<4, 1>(0, 4);
    return {y, F};
}

std::pair<Phase4, Mat4> bump_rotation_flow(double alpha, double r, double nu,
                                           const Phase4& y0, double t) {
    BumpProfile p = build_bumps(r, nu, alpha);
    Phase4 y = closed_form_flow(p, y0, t);
    // differential by central differences of the closed-form map
    const double h = 1e-6;
    Mat4 F;
    for (int i = 0; i < 4; ++i) {
        Phase4 yp = y0, ym = y0;
        yp(i) += h;
        ym(i) -= h;
        F.col(i) = (closed_form_flow(p, yp, t) - closed_form_flow(p, ym, t)) /
                   (2.0 * h);
    }
    return {y, F};
}

}  // namespace

std::pair<Phase4, Mat4> reference_flow(const std::string& id, const Phase4& y0,
                                       double t) {
    if (id == "translation") {
        Phase4 y = y0;
        y(0) += t;
        return {y, Mat4::Identity()};
    }
    if (id == "hyperbolic-drift" || id == "elliptic-drift") {
        Mat4 S = Mat4::Zero();
        S(1, 1) = 1.0;
        S(3, 3) = (id == "hyperbolic-drift") ? -1.0 : 1.0;
        // X_H = J(Sy + e3), J e3 = e1
        return affine_flow(S, Vec4::Unit(0), y0, t);
    }
    std::string args;
    if (match_call(id, "quadratic", args)) {
        auto v = parse_reals(args);
        if (v.size() != 10)
            throw UnsupportedError("quadratic(...) needs 10 entries");
        Mat4 S;
        const int ii[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
        const int jj[10] = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};
        for (int k = 0; k < 10; ++k) {
            S(ii[k], jj[k]) = v[k];
            S(jj[k], ii[k]) = v[k];
        }
        Mat4 F = (t * symplectic_J() * S).exp();
        return {F * y0, F};
    }
    if (match_call(id, "bump-rotation", args)) {
        auto v = parse_reals(args);
        if (v.size() != 3)
            throw UnsupportedError("bump-rotation(alpha,r,nu) needs 3 entries");
        return bump_rotation_flow(v[0], v[1], v[2], y0, t);
    }
    throw UnsupportedError("no closed-form flow for catalog id: " + id);
}

}  // namespace hamflow
