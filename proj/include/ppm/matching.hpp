#pragma once

#include "ppm/error.hpp"

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace ppm {

template <typename Scalar>
struct MatchingResult
{
  std::vector<Eigen::Index> item_of_buyer;  // -1 when the buyer stays unmatched
  std::vector<bool> item_matched;
  Scalar welfare{0};
};

namespace detail {

/// Min-cost assignment of every row of `cost` (rows <= cols) to a distinct
/// column, O(rows^2 cols) shortest augmenting paths with potentials. Returns
/// the column chosen by each row; ties go to the lowest column index.
template <typename Scalar>
std::vector<Eigen::Index> assign_rows(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> const &cost)
{
  using Index       = Eigen::Index;
  Index const rows  = cost.rows();
  Index const cols  = cost.cols();
  Scalar const huge = std::numeric_limits<Scalar>::max();

  std::vector<Scalar> u(static_cast<std::size_t>(rows + 1), Scalar(0));
  std::vector<Scalar> v(static_cast<std::size_t>(cols + 1), Scalar(0));
  std::vector<Index> owner(static_cast<std::size_t>(cols + 1), 0);  // column -> row (1-based), 0 free
  std::vector<Index> way(static_cast<std::size_t>(cols + 1), 0);
  std::vector<Scalar> minv(static_cast<std::size_t>(cols + 1));
  std::vector<char> used(static_cast<std::size_t>(cols + 1));

  for (Index row = 1; row <= rows; ++row)
  {
    owner[0]  = row;
    Index col0 = 0;
    std::fill(minv.begin(), minv.end(), huge);
    std::fill(used.begin(), used.end(), char{0});
    do
    {
      used[static_cast<std::size_t>(col0)] = 1;
      Index const row0 = owner[static_cast<std::size_t>(col0)];
      Scalar delta     = huge;
      Index col1       = 0;
      for (Index col = 1; col <= cols; ++col)
      {
        auto const c = static_cast<std::size_t>(col);
        if (used[c])
        {
          continue;
        }
        Scalar const reduced = cost(row0 - 1, col - 1) - u[static_cast<std::size_t>(row0)] - v[c];
        if (reduced < minv[c])
        {
          minv[c] = reduced;
          way[c]  = col0;
        }
        if (minv[c] < delta)
        {
          delta = minv[c];
          col1  = col;
        }
      }
      for (Index col = 0; col <= cols; ++col)
      {
        auto const c = static_cast<std::size_t>(col);
        if (used[c])
        {
          u[static_cast<std::size_t>(owner[c])] += delta;
          v[c] -= delta;
        }
        else
        {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[static_cast<std::size_t>(col0)] != 0);
    do
    {
      Index const col1 = way[static_cast<std::size_t>(col0)];
      owner[static_cast<std::size_t>(col0)] = owner[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<Index> column_of_row(static_cast<std::size_t>(rows), -1);
  for (Index col = 1; col <= cols; ++col)
  {
    if (Index const r = owner[static_cast<std::size_t>(col)]; r != 0)
    {
      column_of_row[static_cast<std::size_t>(r - 1)] = col - 1;
    }
  }
  return column_of_row;
}

}  // namespace detail

/// Exact maximum-weight bipartite matching between buyers (rows) and items
/// (columns). The smaller side is matched completely, which is the same as
/// padding the matrix to a square with zero entries.
template <typename Derived>
MatchingResult<typename Derived::Scalar> max_weight_matching(Eigen::MatrixBase<Derived> const &values)
{
  using Scalar = typename Derived::Scalar;
  using Index  = Eigen::Index;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  if (values.hasNaN())
  {
    throw ValidationError("max_weight_matching: NaN entry");
  }
  if (!values.allFinite() || (values.array() < Scalar(0)).any())
  {
    throw ValidationError("max_weight_matching: entries must be finite and non-negative");
  }
  Index const buyers = values.rows();
  Index const items  = values.cols();
  MatchingResult<Scalar> result;
  result.item_of_buyer.assign(static_cast<std::size_t>(buyers), -1);
  result.item_matched.assign(static_cast<std::size_t>(items), false);
  if (buyers == 0 || items == 0)
  {
    return result;
  }

  if (buyers <= items)
  {
    Matrix const cost = -values.derived();
    auto const cols   = detail::assign_rows<Scalar>(cost);
    for (Index i = 0; i < buyers; ++i)
    {
      result.item_of_buyer[static_cast<std::size_t>(i)] = cols[static_cast<std::size_t>(i)];
    }
  }
  else
  {
    Matrix const cost = -values.derived().transpose();
    auto const rows   = detail::assign_rows<Scalar>(cost);
    for (Index j = 0; j < items; ++j)
    {
      result.item_of_buyer[static_cast<std::size_t>(rows[static_cast<std::size_t>(j)])] = j;
    }
  }
  // Summed in item order so separable profiles reproduce the closed form bit for bit.
  std::vector<Index> buyer_of_item(static_cast<std::size_t>(items), -1);
  for (Index i = 0; i < buyers; ++i)
  {
    if (Index const j = result.item_of_buyer[static_cast<std::size_t>(i)]; j >= 0)
    {
      buyer_of_item[static_cast<std::size_t>(j)] = i;
    }
  }
  for (Index j = 0; j < items; ++j)
  {
    if (Index const i = buyer_of_item[static_cast<std::size_t>(j)]; i >= 0)
    {
      result.item_matched[static_cast<std::size_t>(j)] = true;
      result.welfare += values(i, j);
    }
  }
  return result;
}

}  // namespace ppm
