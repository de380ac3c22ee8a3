"""The concrete security bound, as exact arithmetic you can sweep.

    total = numCalls * ( 2^(2t-256) + 2^(t-255)  +  (1+blocksPerCall)^2 / 2^eta )
                        `------- HMAC as PRF --'   `----- collision term -----'

Run:  python3 demos/04_security_bound.py
"""

from drbglab.bounds import (
    BoundInputs,
    birthday_exact,
    format_rational,
    pr_collisions,
    prf_advantage_hmac,
    total_bound,
)

# The reference operating point: an adversary bounded by 2^78 work,
# 2^48 generate calls, 10 output blocks per call, 128-bit blocks.
inputs = BoundInputs(t=78, num_calls=1 << 48, blocks_per_call=10, eta=128)
advantage = prf_advantage_hmac(inputs.t)
collisions = pr_collisions(inputs.blocks_per_call, inputs.eta)
total = total_bound(inputs)

print(f"prf term   : {advantage}")
print(f"collision  : {format_rational(collisions)}")
print(f"total      : log2 = {total.log2:.6f}  (about 2^-52)")
print()

# Everything is a Fraction until the moment it is displayed, so there
# is no float underflow anywhere — these denominators exceed 2^250.
tiny = prf_advantage_hmac(2).value
print(f"at t=2 the prf term is exactly {format_rational(tiny)}")
print(f"float(it) would be {float(tiny)!r}, but its log2 is {prf_advantage_hmac(2).log2:.2f}")
print()

# Sweep the adversary budget. Past t = 128 the PRF term reaches 1 and
# the bound stops saying anything (vacuous).
print(" t   log2(total)   vacuous")
for t in (40, 64, 78, 100, 120, 127, 128, 140):
    q = total_bound(BoundInputs(t, inputs.num_calls, 10, 128))
    print(f"{t:>3}   {q.log2:>11.2f}   {q.vacuous}")
print()

# The collision term is a closed-form stand-in for an exact birthday
# probability; at small sizes you can see the slack directly.
for b, eta in ((3, 8), (10, 12)):
    exact = birthday_exact(b + 1, 1 << eta)
    bound = pr_collisions(b, eta)
    print(f"b={b:>2} eta={eta:>2}: exact birthday {format_rational(exact)} "
          f"<= bound {format_rational(bound)}")
