"""Words, presentations, verdicts, Tietze moves and the normal-closure engine."""
