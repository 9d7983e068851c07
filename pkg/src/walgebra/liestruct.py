"""Finite-dimensional scaffolding: sl(N) / sl(N1|N2) with a block nilpotent.

Everything here is exact linear algebra over Q on sparse block matrices:

* the partition data and the induced block decomposition,
* the sl2-triple (e, x, f) attached to the block nilpotent f,
* the supertrace form scaled so (e|f) = 1,
* the centralizer of f with its canonical basis, the dual basis pinned by
  ad-e-invariance and biorthonormality, and the two ladder families obtained
  by walking each sl2-string up from the centralizer and down from its dual,
* the projection onto the centralizer along the other ad-f string spaces.

Indices follow the block conventions used throughout the package: blocks are
1-based, and entry (r, c) of block (bi, bj) means row r of block bi, column c
of block bj, both 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import NamedTuple, Optional

from .errors import NormalizationImpossible, SingularPairing, SuperEqualParts, WAlgebraError
from .linalg import Echelon, kernel_basis, solve

F = Fraction
_F0 = F(0)
_F1 = F(1)


class GenIndex(NamedTuple):
    """Index of a centralizer basis element: weight t, block pair (i, j).

    The parity tag is determined by the block pair within a fixed algebra and
    participates in equality only vacuously; always build these through
    AlgebraCtx.gen so the tag is set consistently.
    """

    t: Fraction
    i: int
    j: int
    parity: int = 0

    @property
    def weight(self) -> Fraction:
        return self.t

    def sort_key(self):
        return (self.t, self.i, self.j)

    def __str__(self) -> str:
        return f"q[{self.t}]({self.i},{self.j})"


@dataclass(frozen=True)
class PartitionSpec:
    """Which algebra: 'sl' with one partition, or 'sl_super' with two."""

    kind: str
    parts1: tuple[int, ...]
    parts2: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("sl", "sl_super"):
            raise WAlgebraError(f"unknown algebra kind {self.kind!r}")
        for parts in (self.parts1, self.parts2):
            if any((not isinstance(m, int)) or m < 1 for m in parts):
                raise WAlgebraError(f"partition parts must be positive integers: {parts}")
            if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
                raise WAlgebraError(f"partition must be non-increasing: {parts}")
        if not self.parts1:
            raise WAlgebraError("empty partition")
        if self.kind == "sl" and self.parts2:
            raise WAlgebraError("plain sl takes a single partition")
        if self.kind == "sl_super":
            if not self.parts2:
                raise WAlgebraError("sl_super needs a second partition")
            if sum(self.parts1) == sum(self.parts2):
                raise SuperEqualParts(
                    f"sl({sum(self.parts1)}|{sum(self.parts2)}) with equal parts is excluded"
                )

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.parts1 + self.parts2

    @property
    def d1(self) -> int:
        """Blocks in the first group (= all of them for plain sl)."""
        return len(self.parts1)

    def describe(self) -> str:
        if self.kind == "sl":
            return f"sl({sum(self.parts1)}) f-type {list(self.parts1)}"
        return (
            f"sl({sum(self.parts1)}|{sum(self.parts2)}) "
            f"f-type {list(self.parts1)}|{list(self.parts2)}"
        )


class BlockShape:
    """Row/column bookkeeping for the block decomposition."""

    def __init__(self, sizes: tuple[int, ...], d1: int):
        self.sizes = sizes
        self.d1 = d1
        self.d = len(sizes)
        self.N = sum(sizes)
        self.offset = [0]
        for m in sizes:
            self.offset.append(self.offset[-1] + m)
        self.block_of = []
        for b, m in enumerate(sizes):
            self.block_of.extend([b + 1] * m)
        # supertrace sign per global index: +1 in the first group, -1 after
        self.eps = [1 if self.block_of[r] <= d1 else -1 for r in range(self.N)]

    def group(self, block: int) -> int:
        """0 for the first block group, 1 for the second (super only)."""
        return 0 if block <= self.d1 else 1

    def pair_parity(self, bi: int, bj: int) -> int:
        return (self.group(bi) + self.group(bj)) % 2

    def glob(self, block: int, r: int) -> int:
        """Global 0-based index of 1-based row r of 1-based block."""
        return self.offset[block - 1] + (r - 1)


class SuperMatrix:
    """Sparse exact matrix bound to a block shape.

    entries maps global (row, col) 0-based pairs to nonzero Fractions."""

    __slots__ = ("shape", "entries")

    def __init__(self, shape: BlockShape, entries: Optional[dict] = None):
        self.shape = shape
        self.entries = entries or {}

    def copy(self) -> "SuperMatrix":
        return SuperMatrix(self.shape, dict(self.entries))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, SuperMatrix) and self.entries == other.entries

    def __add__(self, other: "SuperMatrix") -> "SuperMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            w = out.get(k, _F0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return SuperMatrix(self.shape, out)

    def __sub__(self, other: "SuperMatrix") -> "SuperMatrix":
        return self + other.scale(-1)

    def __neg__(self) -> "SuperMatrix":
        return self.scale(-1)

    def scale(self, s) -> "SuperMatrix":
        s = F(s)
        if not s:
            return SuperMatrix(self.shape)
        return SuperMatrix(self.shape, {k: v * s for k, v in self.entries.items()})

    def mul(self, other: "SuperMatrix") -> "SuperMatrix":
        """Plain matrix product (no signs; signs belong to the bracket)."""
        by_row: dict[int, list] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, c), v in self.entries.items():
            for c2, w in by_row.get(c, ()):
                k = (r, c2)
                s = out.get(k, _F0) + v * w
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return SuperMatrix(self.shape, out)

    def parity(self) -> Optional[int]:
        """0 or 1 if all entries sit in blocks of one parity, else None."""
        p = None
        sh = self.shape
        for (r, c) in self.entries:
            q = (0 if sh.eps[r] == sh.eps[c] else 1)
            if p is None:
                p = q
            elif p != q:
                return None
        return 0 if p is None else p

    def parity_part(self, p: int) -> "SuperMatrix":
        sh = self.shape
        want = {k: v for k, v in self.entries.items()
                if (0 if sh.eps[k[0]] == sh.eps[k[1]] else 1) == p}
        return SuperMatrix(sh, want)

    def comm(self, other: "SuperMatrix") -> "SuperMatrix":
        """Supercommutator [a, b] = ab - (-1)^{p(a)p(b)} ba, extended
        bilinearly over parity components when either side is mixed."""
        pa, pb = self.parity(), other.parity()
        if pa is None:
            return self.parity_part(0).comm(other) + self.parity_part(1).comm(other)
        if pb is None:
            return self.comm(other.parity_part(0)) + self.comm(other.parity_part(1))
        ab = self.mul(other)
        ba = other.mul(self)
        return ab + ba.scale(-1 if not (pa and pb) else 1)

    def supertrace(self) -> Fraction:
        tot = _F0
        for (r, c), v in self.entries.items():
            if r == c:
                tot += v * self.shape.eps[r]
        return tot

    def transpose_support(self) -> set:
        return {(c, r) for (r, c) in self.entries}

    def flatten(self) -> dict[int, Fraction]:
        """Vectorize for span comparisons: column index = r*N + c."""
        N = self.shape.N
        return {r * N + c: v for (r, c), v in self.entries.items()}

    def __repr__(self) -> str:
        items = sorted(self.entries.items())
        body = ", ".join(f"({r},{c}):{v}" for (r, c), v in items)
        return f"SuperMatrix({body})"


@dataclass
class CentralizerData:
    """The centralizer basis with its dual and ladder families.

    basisF[g]     -- q_g, the ad-f-kernel basis element for GenIndex g
    basisE[g]     -- q*_g, its dual in the ad-e-kernel, (q*_g | q_g) = 1
    dualFamily[g][n]  -- (ad f)^n q*_g, defined for 0 <= n <= 2 delta(g)
    adFPowers[g][n]   -- the matching downward family through q_g obtained by
                         scaled ad-e powers, biorthonormal to dualFamily
    delta[g]      -- half-length of the sl2-string through q_g (= t - 1)
    """

    gens: list[GenIndex]
    basisF: dict[GenIndex, SuperMatrix]
    delta: dict[GenIndex, Fraction]
    basisE: dict[GenIndex, SuperMatrix] = field(default_factory=dict)
    dualFamily: dict[GenIndex, list[SuperMatrix]] = field(default_factory=dict)
    adFPowers: dict[GenIndex, list[SuperMatrix]] = field(default_factory=dict)
    col: dict[GenIndex, int] = field(default_factory=dict)

    def __post_init__(self):
        self.col = {g: i for i, g in enumerate(self.gens)}


class AlgebraCtx:
    """A fixed algebra + nilpotent: block shape, sl2-triple, scaled form."""

    def __init__(self, spec: PartitionSpec):
        self.spec = spec
        self.shape = BlockShape(spec.sizes, spec.d1)
        sh = self.shape
        self.f = self._build_f()
        self.x = self._build_x()
        self.e = self._build_e()
        s = self.e.mul(self.f).supertrace()
        if not s:
            raise NormalizationImpossible(
                f"str(ef) = 0 for {spec.describe()}; the form cannot give (e|f)=1"
            )
        self.form_scale = 1 / s
        self._xdiag = [self.x.entries.get((r, r), _F0) for r in range(sh.N)]
        self._cdata: Optional[CentralizerData] = None

    # -- construction helpers ------------------------------------------------

    def unit(self, bi: int, bj: int, r: int, c: int, v=1) -> SuperMatrix:
        """v * e^{(bi,bj)}_{r,c} (1-based blocks and in-block positions)."""
        sh = self.shape
        return SuperMatrix(sh, {(sh.glob(bi, r), sh.glob(bj, c)): F(v)})

    def _build_f(self) -> SuperMatrix:
        m = SuperMatrix(self.shape)
        for b, size in enumerate(self.shape.sizes, start=1):
            for i in range(1, size):
                m += self.unit(b, b, i + 1, i)
        return m

    def _build_x(self) -> SuperMatrix:
        m = SuperMatrix(self.shape)
        for b, size in enumerate(self.shape.sizes, start=1):
            for i in range(1, size + 1):
                val = F(size - 1, 2) - (i - 1)
                if val:
                    m += self.unit(b, b, i, i, val)
        return m

    def _build_e(self) -> SuperMatrix:
        m = SuperMatrix(self.shape)
        for b, size in enumerate(self.shape.sizes, start=1):
            for i in range(1, size):
                m += self.unit(b, b, i, i + 1, i * (size - i))
        return m

    # -- structure maps ------------------------------------------------------

    def pair(self, a: SuperMatrix, b: SuperMatrix) -> Fraction:
        """The invariant form (a|b), supertrace scaled so (e|f) = 1."""
        return a.mul(b).supertrace() * self.form_scale

    def grade_of(self, m: SuperMatrix) -> Optional[Fraction]:
        """Common ad-x eigenvalue of all entries, or None if mixed/zero."""
        g = None
        for (r, c) in m.entries:
            val = self._xdiag[r] - self._xdiag[c]
            if g is None:
                g = val
            elif g != val:
                return None
        return g

    def gen(self, t, i: int, j: int) -> GenIndex:
        """Build a GenIndex with the parity tag this algebra assigns."""
        return GenIndex(F(t), i, j, self.shape.pair_parity(i, j))

    def sl_basis(self) -> list[SuperMatrix]:
        """Deterministic basis of sl: off-diagonal units then supertraceless
        diagonal differences."""
        sh = self.shape
        out = []
        for r in range(sh.N):
            for c in range(sh.N):
                if r != c:
                    out.append(SuperMatrix(sh, {(r, c): _F1}))
        for r in range(sh.N - 1):
            out.append(SuperMatrix(sh, {(r, r): F(sh.eps[r]), (r + 1, r + 1): F(-sh.eps[r + 1])}))
        return out

    @property
    def dim_sl(self) -> int:
        return self.shape.N * self.shape.N - 1

    def centralizer(self) -> CentralizerData:
        if self._cdata is None:
            cd = centralizer_basis(self)
            dual_bases(self, cd)
            self._cdata = cd
        return self._cdata


def build_algebra(spec: PartitionSpec) -> AlgebraCtx:
    """Validate the partition data and assemble the algebra context."""
    return AlgebraCtx(spec)


# ---------------------------------------------------------------------------
# centralizer basis


def centralizer_basis(ctx: AlgebraCtx) -> CentralizerData:
    """The canonical basis of the ad-f kernel inside sl, indexed by GenIndex.

    Off-diagonal block (j, l): weights t with 1 <= t - |m_j - m_l|/2 <=
    min(m_j, m_l); the element is the t-shifted 'staircase' sum of units.
    Diagonal block (j, j): weights 2..m_j, plus the weight-1 supertraceless
    combination against block 1 for j >= 2."""
    sh = ctx.shape
    sizes = sh.sizes
    gens: list[GenIndex] = []
    basisF: dict[GenIndex, SuperMatrix] = {}
    delta: dict[GenIndex, Fraction] = {}

    def put(g: GenIndex, m: SuperMatrix):
        gens.append(g)
        basisF[g] = m
        delta[g] = g.t - 1

    for bj in range(1, sh.d + 1):
        mj = sizes[bj - 1]
        for bl in range(1, sh.d + 1):
            ml = sizes[bl - 1]
            if bj == bl:
                if bj >= 2:
                    m1 = sizes[0]
                    sign = -1 if sh.pair_parity(bj, 1) == 0 else 1
                    mat = SuperMatrix(sh)
                    for i in range(1, m1 + 1):
                        mat += ctx.unit(1, 1, i, i, mj)
                    for i in range(1, mj + 1):
                        mat += ctx.unit(bj, bj, i, i, sign * m1)
                    put(ctx.gen(1, bj, bj), mat)
                for t in range(2, mj + 1):
                    mat = SuperMatrix(sh)
                    for i in range(1, mj - t + 2):
                        mat += ctx.unit(bj, bj, t + i - 1, i)
                    put(ctx.gen(t, bj, bj), mat)
            else:
                half_gap = F(abs(mj - ml), 2)
                for step in range(1, min(mj, ml) + 1):
                    t = half_gap + step
                    tp = int(t + F(mj - ml, 2))
                    count = int(F(mj + ml, 2) + 1 - t)
                    mat = SuperMatrix(sh)
                    for i in range(1, count + 1):
                        mat += ctx.unit(bj, bl, tp + i - 1, i)
                    put(ctx.gen(t, bj, bl), mat)

    gens.sort(key=lambda g: g.sort_key())
    return CentralizerData(gens=gens, basisF=basisF, delta=delta)


def centralizer_oracle(ctx: AlgebraCtx) -> list[SuperMatrix]:
    """Independent computation of ker(ad f) inside sl by raw nullspace."""
    basis = ctx.sl_basis()
    cols = [ctx.f.comm(b).flatten() for b in basis]
    out = []
    for coeffs in kernel_basis(cols):
        m = SuperMatrix(ctx.shape)
        for j, v in coeffs.items():
            m += basis[j].scale(v)
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# dual basis and the two ladder families


def _unit_pool(ctx: AlgebraCtx, bi: int, bj: int, grade: Fraction) -> list[tuple]:
    """All unit positions in block (bi, bj) with the given ad-x grade."""
    sh = ctx.shape
    out = []
    for r in range(1, sh.sizes[bi - 1] + 1):
        for c in range(1, sh.sizes[bj - 1] + 1):
            gr = sh.glob(bi, r)
            gc = sh.glob(bj, c)
            if ctx._xdiag[gr] - ctx._xdiag[gc] == grade:
                out.append((gr, gc))
    return out


def dual_bases(ctx: AlgebraCtx, cdata: CentralizerData) -> CentralizerData:
    """Fill in q*_g and both ladder families.

    q*_g is the unique ad-e-invariant element of the transposed block pair at
    grade delta(g) with (q*_g | q_g) = 1.  The upward family through q*_g is
    (ad f)^n; the downward family through q_g is the rescaled (ad e)^n that
    makes the two families biorthonormal."""
    for g in cdata.gens:
        q = cdata.basisF[g]
        dlt = cdata.delta[g]
        pool = _unit_pool(ctx, g.j, g.i, dlt)
        if not pool:
            raise SingularPairing(f"no candidate slots for the dual of {g}")
        sh = ctx.shape
        # unknowns: coefficients over pool; equations: [e, Q] = 0 plus (Q|q)=1
        rows: list[dict] = []
        rhs: list[Fraction] = []
        eq_index: dict[tuple, int] = {}
        units = [SuperMatrix(sh, {pos: _F1}) for pos in pool]
        brackets = [ctx.e.comm(u) for u in units]
        for jcol, bu in enumerate(brackets):
            for pos, v in bu.entries.items():
                if pos not in eq_index:
                    eq_index[pos] = len(rows)
                    rows.append({})
                    rhs.append(_F0)
                rows[eq_index[pos]][jcol] = v
        norm_row = {jcol: ctx.pair(u, q) for jcol, u in enumerate(units)}
        norm_row = {k: v for k, v in norm_row.items() if v}
        rows.append(norm_row)
        rhs.append(_F1)
        sol = solve(rows, rhs, _F1)
        if sol is None:
            raise SingularPairing(f"dual system inconsistent for {g}")
        qs = SuperMatrix(sh)
        for jcol, v in sol.items():
            qs += units[jcol].scale(v)
        if ctx.e.comm(qs) or ctx.pair(qs, q) != 1:
            raise SingularPairing(f"dual candidate failed its defining relations for {g}")
        cdata.basisE[g] = qs

        two_delta = int(2 * dlt)
        ups = [qs]
        for _ in range(two_delta):
            ups.append(ctx.f.comm(ups[-1]))
        cdata.dualFamily[g] = ups

        # q_g[n] = (-1)^n / (n!^2 * C(2 delta, n)) (ad e)^n q_g
        downs = [q]
        cur = q
        for n in range(1, two_delta + 1):
            cur = ctx.e.comm(cur)
            denom = F(factorial(n) ** 2) * comb(two_delta, n)
            downs.append(cur.scale(F((-1) ** n) / denom))
        cdata.adFPowers[g] = downs
    return cdata


def sharp_coords(ctx: AlgebraCtx, cdata: CentralizerData, z: SuperMatrix) -> dict[GenIndex, Fraction]:
    """Coordinates of the centralizer component of z: g -> (q*_g | z)."""
    out = {}
    for g in cdata.gens:
        v = ctx.pair(cdata.basisE[g], z)
        if v:
            out[g] = v
    return out


def sharp_project(ctx: AlgebraCtx, cdata: CentralizerData, z: SuperMatrix) -> SuperMatrix:
    """Project z onto the ad-f kernel along the rest of each sl2-string."""
    m = SuperMatrix(ctx.shape)
    for g, v in sharp_coords(ctx, cdata, z).items():
        m += cdata.basisF[g].scale(v)
    return m
