"""Machine conductor for the guided-harmony game.

A hidden score of sustained chords is walked through by a machine
conductor: musicians raise a hand when they want to move on, the
conductor answers with camera gestures telling each player who should
adjust and how, then cues the collective change with a downbeat.
"""

__version__ = "0.1.0"
