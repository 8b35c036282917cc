"""StegoVault: hide encrypted files and folders in BMP and WAV covers."""
