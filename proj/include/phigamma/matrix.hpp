#pragma once

// Small dense matrices over field-like and ring-like element types.
// Desk-scale sizes only; determinants by elimination (fields) or cofactor
// expansion (rings).

#include <vector>

#include "phigamma/errors.hpp"

namespace phigamma {

template <class E>
using Mat = std::vector<std::vector<E>>;

template <class E>
Mat<E> mat_identity(int n, const E& one, const E& zero) {
    Mat<E> m(static_cast<size_t>(n), std::vector<E>(static_cast<size_t>(n), zero));
    for (int i = 0; i < n; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(i)] = one;
    return m;
}

template <class E>
Mat<E> mat_mul(const Mat<E>& a, const Mat<E>& b) {
    const size_t n = a.size(), k = b.size(), m = b[0].size();
    Mat<E> r(n, std::vector<E>(m, a[0][0] - a[0][0]));
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < k; ++t)
            for (size_t j = 0; j < m; ++j) r[i][j] = r[i][j] + a[i][t] * b[t][j];
    return r;
}

template <class E>
std::vector<E> mat_vec(const Mat<E>& a, const std::vector<E>& v) {
    const size_t n = a.size();
    std::vector<E> r(n, a[0][0] - a[0][0]);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < v.size(); ++j) r[i] = r[i] + a[i][j] * v[j];
    return r;
}

// field-like: E has is_zero() and inv()
template <class E>
E mat_det_field(Mat<E> a) {
    const int n = static_cast<int>(a.size());
    E zero = a[0][0] - a[0][0];
    bool neg = false;
    E acc = a[0][0];
    bool first = true;
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        for (int i = c; i < n; ++i)
            if (!a[static_cast<size_t>(i)][static_cast<size_t>(c)].is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0) return zero;
        if (pr != c) {
            std::swap(a[static_cast<size_t>(pr)], a[static_cast<size_t>(c)]);
            neg = !neg;
        }
        E piv = a[static_cast<size_t>(c)][static_cast<size_t>(c)];
        acc = first ? piv : acc * piv;
        first = false;
        E pinv = piv.inv();
        for (int i = c + 1; i < n; ++i) {
            E f = a[static_cast<size_t>(i)][static_cast<size_t>(c)] * pinv;
            if (f.is_zero()) continue;
            for (int j = c; j < n; ++j)
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    a[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                    f * a[static_cast<size_t>(c)][static_cast<size_t>(j)];
        }
    }
    return neg ? -acc : acc;
}

template <class E>
Mat<E> mat_inv_field(Mat<E> a, const E& one) {
    const int n = static_cast<int>(a.size());
    E zero = one - one;
    Mat<E> inv = mat_identity(n, one, zero);
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        for (int i = c; i < n; ++i)
            if (!a[static_cast<size_t>(i)][static_cast<size_t>(c)].is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0) throw Error("mat_inv_field: singular matrix");
        std::swap(a[static_cast<size_t>(pr)], a[static_cast<size_t>(c)]);
        std::swap(inv[static_cast<size_t>(pr)], inv[static_cast<size_t>(c)]);
        E pinv = a[static_cast<size_t>(c)][static_cast<size_t>(c)].inv();
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(c)][static_cast<size_t>(j)] = a[static_cast<size_t>(c)][static_cast<size_t>(j)] * pinv;
            inv[static_cast<size_t>(c)][static_cast<size_t>(j)] = inv[static_cast<size_t>(c)][static_cast<size_t>(j)] * pinv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            E f = a[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    a[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * a[static_cast<size_t>(c)][static_cast<size_t>(j)];
                inv[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    inv[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * inv[static_cast<size_t>(c)][static_cast<size_t>(j)];
            }
        }
    }
    return inv;
}

// ring-like: cofactor expansion (desk-scale dimensions)
template <class E>
E mat_det_ring(const Mat<E>& a, const E& zero) {
    const int n = static_cast<int>(a.size());
    if (n == 1) return a[0][0];
    E acc = zero;
    for (int i = 0; i < n; ++i) {
        Mat<E> minor;
        for (int r = 0; r < n; ++r) {
            if (r == i) continue;
            std::vector<E> row;
            for (int c = 1; c < n; ++c) row.push_back(a[static_cast<size_t>(r)][static_cast<size_t>(c)]);
            minor.push_back(std::move(row));
        }
        E term = a[static_cast<size_t>(i)][0] * mat_det_ring(minor, zero);
        acc = (i % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

}  // namespace phigamma
