"""
File Storage (MPD1 / MPC1 / MFP1 컨테이너, 실행 디렉토리)
"""
