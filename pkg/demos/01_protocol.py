"""A sender passes a channel-parameterized abstraction to a receiver.

P ships A = <x>b!(<Z>x!(Z)) over a. Q instantiates it with its private
channel c, which sets up a relay: whatever P later feeds into b arrives at
R over c. We follow the internal steps one at a time.

    python3 demos/01_protocol.py
"""

from hobisim import Tau, canonicalize, parse, print_term, transitions

A = "<x>b!(<Z>x!(Z))"
B = "d!(0)"
O = "e!(0)"
R = "f!(Y) | Y"

P = f"a!({A}) | b(X).(X<{B}> | {O})"
Q = f"a(X).(X<c> | c(Y).({R}))"


def internal_steps(t):
    return [target for action, target in transitions(t) if isinstance(action, Tau)]


def main():
    state = parse(f"{P} | {Q}")
    print("P =", P)
    print("Q =", Q)
    print()
    print("   ", print_term(canonicalize(state).term()))
    step = 0
    while True:
        succ = internal_steps(state)
        if not succ:
            break
        # the system is deterministic: at most one communication is enabled
        assert len(succ) == 1, [print_term(s) for s in succ]
        state = succ[0]
        step += 1
        print(f"-{step}->", print_term(canonicalize(state).term()))
    print()
    print(f"{step} internal steps; R received B and re-emitted it on f")

    print("\nvisible actions of the final state:")
    for action, target in transitions(state):
        print(f"  {action}  then  {print_term(canonicalize(target).term())}")


if __name__ == "__main__":
    main()
