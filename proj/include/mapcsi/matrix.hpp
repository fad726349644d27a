// SPDX-License-Identifier: Apache-2.0
//
// mapcsi: single-site map-assisted localization from massive-MIMO CSI
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MAPCSI_MATRIX_HPP
#define MAPCSI_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mapcsi
{
    // Dense row-major matrix
    template <typename T>
    class Matrix
    {
    public:
        Matrix() = default;
        Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        std::size_t size() const { return data_.size(); }

        T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<T> data() { return data_; }
        std::span<const T> data() const { return data_; }

        std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

        bool operator==(const Matrix &) const = default;

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<T> data_;
    };

    using CMatrix = Matrix<std::complex<double>>;
    using RMatrix = Matrix<double>;

    // Split (planar) complex storage consumed by the SIMD kernels
    struct PlanarMatrix
    {
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::vector<double> re;
        std::vector<double> im;

        PlanarMatrix() = default;
        PlanarMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), re(r * c, 0.0), im(r * c, 0.0) {}

        static PlanarMatrix from(const CMatrix &m);
        CMatrix to_complex() const;
    };

    inline PlanarMatrix PlanarMatrix::from(const CMatrix &m)
    {
        PlanarMatrix p(m.rows(), m.cols());
        const auto d = m.data();
        for (std::size_t i = 0; i < d.size(); ++i)
        {
            p.re[i] = d[i].real();
            p.im[i] = d[i].imag();
        }
        return p;
    }

    inline CMatrix PlanarMatrix::to_complex() const
    {
        CMatrix m(rows, cols);
        auto d = m.data();
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = {re[i], im[i]};
        return m;
    }

} // namespace mapcsi

#endif
