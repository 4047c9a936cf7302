"""Clifford+T gate files lowered to Pauli-product circuits.

Cliffords are commuted past the T gates and dropped: moving a pi/8
rotation about Z_q from after a Clifford prefix C to before it changes
its axis to the conjugated Pauli C^-1 Z_q C. The tableau therefore
stores the images of X_q / Z_q under conjugation by the INVERSE of the
accumulated Clifford, so each gate update substitutes on the input side
of the stored images. tdg contributes the opposite rotation sign.

Paulis are packed as (xmask, zmask, phase) encoding i^phase * X^x * Z^z
with phase mod 4; Hermitian operators have a well-defined +/-1 sign.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .pauli import Circuit, PauliProduct

GATE_ARITY = {"h": 1, "s": 1, "sdg": 1, "x": 1, "y": 1, "z": 1,
              "cx": 2, "cz": 2, "t": 1, "tdg": 1}
CLIFFORD_KINDS = frozenset(GATE_ARITY) - {"t", "tdg"}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class GateList:
    num_qubits: int
    gates: tuple[Gate, ...]


def parse_gates(text: str) -> GateList:
    """Parse the line format: `qubits <n>` header, one gate per line, `#` comments."""
    num_qubits = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if num_qubits is None:
            if parts[0] != "qubits" or len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected header 'qubits <n>'", lineno)
            num_qubits = int(parts[1])
            if num_qubits < 1:
                raise ParseError("qubit count must be >= 1", lineno)
            continue
        kind = parts[0]
        if kind not in GATE_ARITY:
            raise ParseError(f"unknown gate {kind!r}", lineno)
        args = parts[1:]
        if len(args) != GATE_ARITY[kind]:
            raise ParseError(f"{kind} takes {GATE_ARITY[kind]} operand(s)", lineno)
        try:
            qubits = tuple(int(a) for a in args)
        except ValueError:
            raise ParseError(f"bad operand in {line!r}", lineno) from None
        for q in qubits:
            if not 0 <= q < num_qubits:
                raise ParseError("qubit index out of range", lineno)
        if len(qubits) == 2 and qubits[0] == qubits[1]:
            raise ParseError(f"{kind} operands must be distinct", lineno)
        gates.append(Gate(kind, qubits))
    if num_qubits is None:
        raise ParseError("missing 'qubits <n>' header")
    return GateList(num_qubits, tuple(gates))


# ---------------------------------------------------------------------------
# Packed-Pauli arithmetic

def pauli_mul(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    """Multiply i^p1 X^x1 Z^z1 by i^p2 X^x2 Z^z2 (Z^z1 hops over X^x2)."""
    x1, z1, p1 = a
    x2, z2, p2 = b
    return (x1 ^ x2, z1 ^ z2, (p1 + p2 + 2 * (z1 & x2).bit_count()) % 4)


def pauli_sign(p: tuple[int, int, int]) -> int:
    """Sign of a Hermitian packed Pauli relative to its X/Y/Z tensor form."""
    x, z, phase = p
    canon = (x & z).bit_count() % 4
    rel = (phase - canon) % 4
    if rel == 0:
        return 1
    if rel == 2:
        return -1
    raise ValueError(f"non-Hermitian Pauli {p}")


def paulis_commute(a: tuple[int, int, int], b: tuple[int, int, int]) -> bool:
    return ((a[0] & b[1]).bit_count() + (a[1] & b[0]).bit_count()) % 2 == 0


def pauli_to_product(p: tuple[int, int, int], seq: int = 0) -> tuple[PauliProduct, int]:
    """Unpack to a PauliProduct plus +/-1 sign. Identity is rejected."""
    x, z, _ = p
    ops = []
    support = x | z
    q = 0
    while support >> q:
        bit = 1 << q
        if support & bit:
            if x & bit and z & bit:
                ops.append((q, "Y"))
            elif x & bit:
                ops.append((q, "X"))
            else:
                ops.append((q, "Z"))
        q += 1
    if not ops:
        raise ValueError("identity Pauli has no product form")
    return PauliProduct(tuple(ops), seq), pauli_sign(p)


# ---------------------------------------------------------------------------
# Tableau

class CliffordTableau:
    """Images of X_q and Z_q under conjugation by the inverse accumulated Clifford."""

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self.img_x = [(1 << q, 0, 0) for q in range(num_qubits)]
        self.img_z = [(0, 1 << q, 0) for q in range(num_qubits)]

    def image(self, basis: str, q: int) -> tuple[int, int, int]:
        return self.img_x[q] if basis == "X" else self.img_z[q]

    def apply(self, gate: Gate) -> None:
        """Fold one more Clifford gate into the stored inverse images."""
        if gate.kind not in CLIFFORD_KINDS:
            raise ValueError(f"not a Clifford gate: {gate.kind}")
        ix, iz = self.img_x, self.img_z
        if gate.kind in ("cx", "cz"):
            a, b = gate.qubits
            if gate.kind == "cx":
                ix[a] = pauli_mul(ix[a], ix[b])
                iz[b] = pauli_mul(iz[a], iz[b])
            else:
                ix[a], ix[b] = pauli_mul(ix[a], iz[b]), pauli_mul(iz[a], ix[b])
            return
        (q,) = gate.qubits
        kind = gate.kind
        if kind == "h":
            ix[q], iz[q] = iz[q], ix[q]
        elif kind == "s":  # S^-1 X S = -Y = i^3 XZ
            x, z, p = pauli_mul(ix[q], iz[q])
            ix[q] = (x, z, (p + 3) % 4)
        elif kind == "sdg":  # S X S^-1 = Y = i XZ
            x, z, p = pauli_mul(ix[q], iz[q])
            ix[q] = (x, z, (p + 1) % 4)
        elif kind == "x":
            iz[q] = _negate(iz[q])
        elif kind == "y":
            ix[q] = _negate(ix[q])
            iz[q] = _negate(iz[q])
        elif kind == "z":
            ix[q] = _negate(ix[q])

    def check_symplectic(self) -> None:
        """Raise if the stored images are not a valid Clifford action."""
        n = self.num_qubits
        for q in range(n):
            pauli_sign(self.img_x[q])
            pauli_sign(self.img_z[q])
            if paulis_commute(self.img_x[q], self.img_z[q]):
                raise ValueError(f"X_{q} and Z_{q} images commute")
            for r in range(q + 1, n):
                for a in (self.img_x[q], self.img_z[q]):
                    for b in (self.img_x[r], self.img_z[r]):
                        if not paulis_commute(a, b):
                            raise ValueError(f"images of qubits {q},{r} anticommute")


def _negate(p: tuple[int, int, int]) -> tuple[int, int, int]:
    return (p[0], p[1], (p[2] + 2) % 4)


def apply_clifford(tableau: CliffordTableau, gate: Gate) -> CliffordTableau:
    tableau.apply(gate)
    return tableau


# ---------------------------------------------------------------------------
# Lowering

def transpile_signed(gates: GateList) -> tuple[Circuit, tuple[int, ...]]:
    """Lower to a product circuit plus per-product rotation signs.

    Signs combine the tableau sign of the conjugated axis with the
    rotation direction (tdg flips it). The scheduler ignores them; they
    exist so the lowering can be checked against a unitary oracle.
    """
    tab = CliffordTableau(gates.num_qubits)
    products = []
    signs = []
    for gate in gates.gates:
        if gate.kind in CLIFFORD_KINDS:
            tab.apply(gate)
            continue
        axis = tab.img_z[gate.qubits[0]]
        product, sign = pauli_to_product(axis, seq=len(products))
        if gate.kind == "tdg":
            sign = -sign
        products.append(product)
        signs.append(sign)
    return Circuit(gates.num_qubits, tuple(products)), tuple(signs)


def transpile(gates: GateList) -> Circuit:
    """Lower a gate list to the scheduled pi/8 product sequence."""
    return transpile_signed(gates)[0]
