"""Qubit correlation experiments rendered as data, sound, and music.

Three engines share one toolkit: ``lgcore`` simulates and analyzes the
Leggett-Garg protocol on an evolving qubit, ``sonify`` turns series of
measured spectra into audio and spectrograms, and ``qmusic`` converts
measurement records into a three-voice Shepard-tone composition. The
``lgaudio`` command line ties them together.
"""

__version__ = "0.1.0"
