"""Long lines and trailing whitespace."""   


def total(value_0, value_1, value_2, value_3, value_4, value_5, value_6):   
    """Sum with a very long expression."""  
    return value_0 + value_1 + value_2 + value_3 + value_4 + value_5 + value_6 + value_0 + value_1 + value_2 + value_3 + value_4 + value_5 + value_6 + value_0 + value_1 + value_2 + value_3 + value_4 + value_5 + value_6 + value_0 + value_1 + value_2 + value_3 + value_4 + value_5 + value_6 + value_0 + value_1 + value_2 + value_3 + value_4 + value_5 + value_6 + value_0 + value_1 + value_2 + value_3 + value_4


VALUES = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43, 44, 45, 46, 47, 48, 49, 50, 51, 52, 53, 54, 55, 56, 57, 58, 59, 60, 61, 62, 63, 64, 65, 66, 67, 68, 69, 70, 71, 72, 73, 74, 75, 76, 77, 78, 79]
