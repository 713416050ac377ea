#!/usr/bin/env python3
"""Independent oracle used to compute the frozen test vectors in this repo.

Implements Keccak-256 and alt_bn128 G1 arithmetic from scratch (no external
dependencies) so the constants frozen into the Rust test suite are checked
against a second, unrelated implementation path. Run it to re-derive every
vector; it fails loudly if any cross-check breaks.
"""

# ---------------------------------------------------------------------------
# Keccak-256 (original Keccak padding, as used by the EVM)
# ---------------------------------------------------------------------------

ROUND_CONSTANTS = [
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
]

ROTATION = [
    [0, 36, 3, 41, 18],
    [1, 44, 10, 45, 2],
    [62, 6, 43, 15, 61],
    [28, 55, 25, 21, 56],
    [27, 20, 39, 8, 14],
]

MASK = (1 << 64) - 1


def _rotl(value, shift):
    return ((value << shift) | (value >> (64 - shift))) & MASK


def _keccak_f(state):
    for rc in ROUND_CONSTANTS:
        # theta
        c = [state[x][0] ^ state[x][1] ^ state[x][2] ^ state[x][3] ^ state[x][4] for x in range(5)]
        d = [c[(x - 1) % 5] ^ _rotl(c[(x + 1) % 5], 1) for x in range(5)]
        for x in range(5):
            for y in range(5):
                state[x][y] ^= d[x]
        # rho + pi
        b = [[0] * 5 for _ in range(5)]
        for x in range(5):
            for y in range(5):
                b[y][(2 * x + 3 * y) % 5] = _rotl(state[x][y], ROTATION[x][y])
        # chi
        for x in range(5):
            for y in range(5):
                state[x][y] = b[x][y] ^ ((~b[(x + 1) % 5][y]) & b[(x + 2) % 5][y])
        # iota
        state[0][0] ^= rc
    return state


def keccak256(data: bytes) -> bytes:
    rate = 136
    # original Keccak multi-rate padding: 0x01 .. 0x80
    padded = bytearray(data)
    pad_len = rate - (len(padded) % rate)
    padded += b"\x01" + b"\x00" * (pad_len - 2) + b"\x80" if pad_len >= 2 else b"\x81"
    state = [[0] * 5 for _ in range(5)]
    for block_start in range(0, len(padded), rate):
        block = padded[block_start:block_start + rate]
        for i in range(rate // 8):
            lane = int.from_bytes(block[8 * i:8 * i + 8], "little")
            state[i % 5][i // 5] ^= lane
        _keccak_f(state)
    out = b""
    for i in range(4):  # 32 bytes = 4 lanes
        out += state[i % 5][i // 5].to_bytes(8, "little")
    return out


assert keccak256(b"").hex() == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"
assert keccak256(b"abc").hex() == "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"

# ---------------------------------------------------------------------------
# alt_bn128 G1 arithmetic (affine, with None as the identity)
# ---------------------------------------------------------------------------

P = 21888242871839275222246405745257275088696311157297823662689037894645226208583
Q = 21888242871839275222246405745257275088548364400416034343698204186575808495617

G1 = (1, 2)
H1 = (
    9727523064272218541460723335320998459488975639302513747055235660443850046724,
    5031696974169251245229961296941447383441169981934237515842977230762345915487,
)


def on_curve(pt):
    if pt is None:
        return True
    x, y = pt
    return (y * y - x * x * x - 3) % P == 0


def neg(pt):
    if pt is None:
        return None
    x, y = pt
    return (x, (-y) % P)


def add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    (x1, y1), (x2, y2) = a, b
    if x1 == x2 and (y1 + y2) % P == 0:
        return None
    if a == b:
        lam = (3 * x1 * x1) * pow(2 * y1, P - 2, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, P - 2, P) % P
    x3 = (lam * lam - x1 - x2) % P
    y3 = (lam * (x1 - x3) - y1) % P
    return (x3, y3)


def mul(pt, k):
    acc = None
    addend = pt
    while k:
        if k & 1:
            acc = add(acc, addend)
        addend = add(addend, addend)
        k >>= 1
    return acc


assert mul(G1, Q) is None
assert mul(H1, Q) is None
assert on_curve(G1) and on_curve(H1)


def pack_uint256(values):
    return b"".join(v.to_bytes(32, "big") for v in values)


def normalize(pt):
    # projective (X, Y, Z) with affine (X/Z, Y/Z); identity -> (0, 0)
    if pt is None:
        return (0, 0)
    if len(pt) == 3:
        x, y, z = pt
        zinv = pow(z, P - 2, P)
        return (x * zinv % P, y * zinv % P)
    return pt


def dleq_challenge(a1, a2, x1, y1, x2, y2):
    values = []
    for pt in (a1, a2, x1, y1, x2, y2):
        values.extend(normalize(pt))
    return int.from_bytes(keccak256(pack_uint256(values)), "big")


def dleq_verify(x1, y1, x2, y2, c, r):
    a1 = add(mul(x1, r), mul(y1, c))
    a2 = add(mul(x2, r), mul(y2, c))
    return dleq_challenge(a1, a2, x1, y1, x2, y2) == c


# ---------------------------------------------------------------------------
# Vector 1: published DLEQ sample run (projective coordinates)
# ---------------------------------------------------------------------------

SAMPLE_SECRET = 10366729598460110564106835528331459549420144661779728900553421386151727683717
SAMPLE_XG = (
    19264659997498337231621849020324059839727633018344333818406571209706203133187,
    12311200540645983074100160614979827101793507198593933504549623882564840726866,
    20670726114001654463056991634829687089002941232072263069935333565317103573495,
)
SAMPLE_XH = (
    14945644336923121346342859944168545416458423597018613969345084948695366548579,
    6287194924561282354354695364050405821231283221714798271249840862954991383974,
    9769023299891292075968207384775446300063615377412681646013428758993263180405,
)
SAMPLE_C = 51608323136266335612692795096660702882832975771701719531287921368851758992301
SAMPLE_R = 5697936578451188395987467431508950282667773400761457095498679147707605201421

pub1 = normalize(SAMPLE_XG)
pub2 = normalize(SAMPLE_XH)
assert on_curve(pub1) and on_curve(pub2)
assert mul(G1, SAMPLE_SECRET) == pub1
assert mul(H1, SAMPLE_SECRET) == pub2
assert dleq_verify(G1, pub1, H1, pub2, SAMPLE_C, SAMPLE_R)
print("sample DLEQ run verifies")
print(f"  pub1 affine = {pub1}")
print(f"  pub2 affine = {pub2}")

# ---------------------------------------------------------------------------
# Vector 2: shared-key pad derivation and share encryption
# ---------------------------------------------------------------------------

sk_i = int.from_bytes(keccak256(b"issuer secret"), "big") % Q
sk_j = int.from_bytes(keccak256(b"receiver secret"), "big") % Q
share = int.from_bytes(keccak256(b"share value"), "big") % Q
receiver_index = 3

pk_j = mul(G1, sk_j)
shared = mul(pk_j, sk_i)
assert shared == mul(mul(G1, sk_i), sk_j)
pad = int.from_bytes(keccak256(pack_uint256([shared[0], receiver_index])), "big")
ciphertext = share ^ pad

print("golden encryption vector")
print(f"  sk_i       = {sk_i}")
print(f"  sk_j       = {sk_j}")
print(f"  share      = {share}")
print(f"  receiver j = {receiver_index}")
print(f"  pk_j       = {pk_j}")
print(f"  shared key = {shared}")
print(f"  pad        = {pad:#066x}")
print(f"  ciphertext = {ciphertext:#066x}")
assert (ciphertext ^ pad) % Q == share

# ---------------------------------------------------------------------------
# Vector 3: small evaluation cross-checks
# ---------------------------------------------------------------------------

def eval_poly(coeffs, x):
    return sum(c * pow(x, k, Q) for k, c in enumerate(coeffs)) % Q

assert eval_poly([3, 1, 2], 2) == 13
lam1 = 2 * pow(2 - 1, Q - 2, Q) % Q
lam2 = 1 * pow((1 - 2) % Q, Q - 2, Q) % Q
assert (5 * lam1 + 7 * lam2) % Q == 3
print("polynomial cross-checks hold")
